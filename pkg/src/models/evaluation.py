"""
Evaluation Models Module

Per-project accuracy records, leave-one-out reports, the published
reference results and the comparison table built from both.
"""

import math
from typing import Any, Dict, List, Literal, Optional

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.models.config import FORMAT_VERSION


class ProjectRecord(BaseModel):
    """Outcome of estimating one held-out project."""

    project_id: str
    actual: float
    estimated: Optional[float] = None
    mre: Optional[float] = None
    error: Optional[str] = Field(None, description="Estimator failure, if any")

    @property
    def succeeded(self) -> bool:
        return self.error is None


class EvaluationReport(BaseModel):
    format_version: int = FORMAT_VERSION
    dataset: str
    protocol: str
    effort_unit: str
    config: Dict[str, Any] = Field(description="Effective configuration echo")
    records: List[ProjectRecord]
    mmre_percent: float
    metrics: Dict[str, float] = Field(default_factory=dict)
    failure_count: int = 0
    mean_actual_effort: float
    mean_estimated_effort: float

    @model_validator(mode="after")
    def check_consistency(self):
        failures = sum(1 for record in self.records if not record.succeeded)
        if failures != self.failure_count:
            raise ValueError("failure_count does not match the failed records")
        mres = [record.mre for record in self.successful_records]
        if not mres:
            raise ValueError("a report needs at least one successful record")
        expected = 100.0 * math.fsum(mres) / len(mres)
        if abs(expected - self.mmre_percent) > 1e-9 * max(1.0, abs(expected)):
            raise ValueError("mmre_percent is not 100 x mean MRE")
        return self

    @property
    def successful_records(self) -> List[ProjectRecord]:
        return [record for record in self.records if record.succeeded]

    def records_dataframe(self) -> pd.DataFrame:
        return pd.DataFrame(
            [record.model_dump() for record in self.records],
            columns=["project_id", "actual", "estimated", "mre", "error"],
        )


class ReferenceResults(BaseModel):
    """Published figures the computed results are compared against."""

    model_config = ConfigDict(frozen=True)

    proposed_method: str
    mmre_percent: Dict[str, Dict[str, float]] = Field(
        description="method -> dataset -> MMRE %"
    )
    project_counts: Dict[str, int]
    actual_avg_effort: Dict[str, float]
    estimated_avg_effort: Dict[str, float]

    @property
    def datasets(self) -> List[str]:
        return list(self.project_counts)


class ComparisonRow(BaseModel):
    method: str
    source: Literal["computed", "reference"]
    dataset: str
    mmre_percent: float
    reference_mmre_percent: Optional[float] = None
    delta: Optional[float] = None


class EffortComparisonRow(BaseModel):
    dataset: str
    method: str
    actual_avg_effort: float
    estimated_avg_effort: float
    reference_actual_avg_effort: Optional[float] = None
    reference_estimated_avg_effort: Optional[float] = None
    actual_delta: Optional[float] = None
    estimated_delta: Optional[float] = None


class ComparisonTable(BaseModel):
    rows: List[ComparisonRow] = Field(default_factory=list)
    efforts: List[EffortComparisonRow] = Field(default_factory=list)

    def to_dataframe(self) -> pd.DataFrame:
        return pd.DataFrame(
            [row.model_dump() for row in self.rows],
            columns=list(ComparisonRow.model_fields),
        )

    def efforts_dataframe(self) -> pd.DataFrame:
        return pd.DataFrame(
            [row.model_dump() for row in self.efforts],
            columns=list(EffortComparisonRow.model_fields),
        )
