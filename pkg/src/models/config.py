"""
Run configuration for the command line and the evaluation flow
"""

from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from src.models.estimation import EstimationConfig

FORMAT_VERSION = 1


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"
    SVG = "svg"


class DatasetSource(BaseModel):
    path: str
    name: Optional[str] = Field(
        None, description="Dataset name; taken from @relation or the file stem when None"
    )
    schema_path: Optional[str] = Field(None, description="JSON sidecar for CSV input")


class RunConfig(BaseModel):
    datasets: List[DatasetSource] = Field(default_factory=list)
    drop_incomplete: bool = False
    estimation: EstimationConfig = Field(default_factory=EstimationConfig)
    leaky_partitions: bool = Field(
        False, description="Build partitions once on the full dataset instead of per fold"
    )
    output_dir: str = "output"
    formats: List[OutputFormat] = Field(
        default_factory=lambda: [OutputFormat.JSON, OutputFormat.CSV, OutputFormat.SVG]
    )

    def echo(self) -> Dict[str, Any]:
        """Effective configuration as embedded in every output file."""
        return self.model_dump(mode="json")
