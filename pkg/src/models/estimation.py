"""
Pydantic models for similarity retrieval and effort estimation
"""

import math
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.models.fuzzy import FuzzyConfig


class Aggregation(str, Enum):
    """How two membership vectors of one attribute are compared."""

    MAX_MIN = "max_min"
    SUM_PRODUCT = "sum_product"


class Combination(str, Enum):
    """How per-attribute similarities merge into a project similarity."""

    ARITHMETIC_MEAN = "arithmetic_mean"
    MINIMUM = "minimum"
    PRODUCT = "product"


class Normalization(str, Enum):
    RAW = "raw"
    CLAMPED = "clamped_at_1"


class SimilarityConfig(BaseModel):
    aggregation: Aggregation = Aggregation.MAX_MIN
    combination: Combination = Combination.ARITHMETIC_MEAN
    normalization: Normalization = Normalization.CLAMPED
    features: Optional[List[str]] = Field(
        None, description="Attributes compared; all partitioned attributes when None"
    )

    @field_validator("features")
    @classmethod
    def features_non_empty(cls, v):
        if v is not None:
            if not v:
                raise ValueError("feature subset must not be empty")
            if len(set(v)) != len(v):
                raise ValueError("feature subset repeats an attribute")
        return v


class SimilarityMatrix(BaseModel):
    """Pairwise project similarities in dataset order."""

    project_ids: List[str]
    scores: List[List[float]]

    @model_validator(mode="after")
    def check_square(self):
        n = len(self.project_ids)
        if len(self.scores) != n or any(len(row) != n for row in self.scores):
            raise ValueError("similarity matrix must be square over its projects")
        return self


class EstimationMode(str, Enum):
    FUZZY_ANALOGY = "fuzzy_analogy"
    COCOMO_ADJUSTED = "cocomo_adjusted"
    CRISP_KNN = "crisp_knn"
    DATASET_MEAN = "dataset_mean"


class Fallback(str, Enum):
    """What fuzzy analogy does when no case is similar at all."""

    DATASET_MEAN = "dataset_mean"
    ERROR = "error"


class EstimationConfig(BaseModel):
    mode: EstimationMode = EstimationMode.FUZZY_ANALOGY
    similarity: SimilarityConfig = Field(default_factory=SimilarityConfig)
    fuzzy: FuzzyConfig = Field(default_factory=FuzzyConfig)
    a: float = Field(2.94, gt=0, description="Multiplicative COCOMO constant")
    b: float = Field(0.91, gt=0, description="COCOMO exponent base")
    k: int = Field(3, ge=1, description="Neighbours for crisp k-NN and COCOMO analogs")
    fallback: Fallback = Fallback.DATASET_MEAN
    weight_power: float = Field(
        1.0, gt=0, description="Similarities are raised to this power before weighting"
    )
    multipliers_path: Optional[str] = Field(
        None, description="Effort multiplier table; the bundled COCOMO 81 table when None"
    )


class CocomoInputs(BaseModel):
    size: float = Field(gt=0, description="Size in KLOC")
    distances: List[float] = Field(default_factory=list)
    effort_multipliers: List[float] = Field(default_factory=list)

    @field_validator("effort_multipliers")
    @classmethod
    def multipliers_positive(cls, v):
        if any(multiplier <= 0 for multiplier in v):
            raise ValueError("effort multipliers must be positive")
        return v


class Contribution(BaseModel):
    project_id: str
    weight: float


class Estimate(BaseModel):
    value: float = Field(gt=0)
    mode: EstimationMode
    contributions: List[Contribution] = Field(default_factory=list)
    fallback_used: bool = False

    @model_validator(mode="after")
    def weights_normalized(self):
        if self.contributions:
            total = math.fsum(c.weight for c in self.contributions)
            if abs(total - 1.0) > 1e-9:
                raise ValueError(f"contribution weights sum to {total}, not 1")
        return self

    def top_contributions(self, n: int = 5) -> List[Contribution]:
        """Heaviest analogs first; ties keep dataset order."""
        return sorted(self.contributions, key=lambda c: -c.weight)[:n]
