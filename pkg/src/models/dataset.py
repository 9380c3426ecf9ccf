"""
Pydantic models for historical project datasets
"""

from enum import Enum
from typing import Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

Value = Optional[Union[float, str]]


class AttributeKind(str, Enum):
    NUMERIC = "numeric"
    CATEGORICAL = "categorical"


class AttributeSchema(BaseModel):
    """One project attribute, numeric or described by ordered linguistic terms."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(description="Attribute name as declared in the source file")
    kind: AttributeKind
    terms: Optional[List[str]] = Field(
        None, description="Ordered term labels, lowest rating first"
    )
    unit: Optional[str] = Field(None, description="Free-text unit tag for numerics")

    @model_validator(mode="after")
    def check_terms(self):
        if self.kind == AttributeKind.CATEGORICAL:
            if not self.terms:
                raise ValueError(f"categorical attribute {self.name!r} has no terms")
            if len(set(self.terms)) != len(self.terms):
                raise ValueError(f"categorical attribute {self.name!r} repeats a term")
            if self.unit is not None:
                raise ValueError(f"categorical attribute {self.name!r} cannot carry a unit")
        elif self.terms is not None:
            raise ValueError(f"numeric attribute {self.name!r} cannot declare terms")
        return self

    @property
    def is_categorical(self) -> bool:
        return self.kind == AttributeKind.CATEGORICAL


class Project(BaseModel):
    """A historical (or query) project: attribute values plus its actual effort."""

    model_config = ConfigDict(frozen=True)

    id: str
    values: Dict[str, Value] = Field(default_factory=dict)
    actual_effort: Optional[float] = Field(
        None, gt=0, description="Actual effort; absent only on query projects"
    )

    def missing_features(self, features: Optional[List[str]] = None) -> List[str]:
        names = features if features is not None else list(self.values)
        return [name for name in names if self.values.get(name) is None]

    def is_complete(self, features: Optional[List[str]] = None) -> bool:
        return not self.missing_features(features)


class Dataset(BaseModel):
    """
    A validated, immutable collection of projects sharing one attribute schema.

    The effort and id columns of the source file are not part of `attributes`;
    they live in `Project.actual_effort` and `Project.id`.
    """

    model_config = ConfigDict(frozen=True)

    name: str
    attributes: List[AttributeSchema]
    projects: List[Project]
    effort_unit: str = "person-months"
    effort_column: str = "act_effort"
    id_column: str = Field(
        "id", description="Column holding project ids; row numbers are exported as 'id'"
    )
    size_column: Optional[str] = None
    dropped_incomplete: int = Field(
        0, description="Projects removed by drop_incomplete before this dataset"
    )

    @model_validator(mode="after")
    def check_conformance(self):
        names = [attribute.name for attribute in self.attributes]
        if len(set(names)) != len(names):
            raise ValueError("attribute names must be unique")
        ids = [project.id for project in self.projects]
        if len(set(ids)) != len(ids):
            raise ValueError("project ids must be unique")

        by_name = {attribute.name: attribute for attribute in self.attributes}
        for project in self.projects:
            if project.actual_effort is None:
                raise ValueError(f"project {project.id!r} has no actual effort")
            if set(project.values) != set(names):
                raise ValueError(f"project {project.id!r} does not match the schema")
            for name, value in project.values.items():
                if value is None:
                    continue
                attribute = by_name[name]
                if attribute.is_categorical:
                    if not isinstance(value, str) or value not in attribute.terms:
                        raise ValueError(
                            f"project {project.id!r}: {value!r} is not a term of {name!r}"
                        )
                elif not isinstance(value, float):
                    raise ValueError(
                        f"project {project.id!r}: {name!r} expects a number, got {value!r}"
                    )
        return self

    def __len__(self) -> int:
        return len(self.projects)

    @property
    def attribute_names(self) -> List[str]:
        return [attribute.name for attribute in self.attributes]

    def attribute(self, name: str) -> AttributeSchema:
        for attribute in self.attributes:
            if attribute.name == name:
                return attribute
        raise KeyError(name)

    @property
    def efforts(self) -> List[float]:
        return [project.actual_effort for project in self.projects]

    @property
    def incomplete_count(self) -> int:
        return sum(1 for project in self.projects if not project.is_complete())

    def with_projects(self, projects: List[Project]) -> "Dataset":
        """Copy of this dataset holding a subset of its own projects."""
        return self.model_copy(update={"projects": projects})

    def without(self, index: int) -> "Dataset":
        return self.with_projects(self.projects[:index] + self.projects[index + 1 :])


class AttributeRange(BaseModel):
    kind: AttributeKind
    min: Optional[float] = None
    max: Optional[float] = None
    term_counts: Optional[Dict[str, int]] = None
    missing: int = 0


class DatasetSummary(BaseModel):
    name: str
    project_count: int
    mean_actual_effort: float
    min_actual_effort: float
    max_actual_effort: float
    effort_unit: str
    incomplete_count: int = 0
    dropped_incomplete: int = 0
    attribute_ranges: Dict[str, AttributeRange] = Field(default_factory=dict)
    reference_mean_effort: Optional[float] = Field(
        None, description="Published average effort for this dataset, when known"
    )
    reference_delta_percent: Optional[float] = Field(
        None, description="Relative gap between computed and published mean, in %"
    )

    @model_validator(mode="after")
    def mean_within_bounds(self):
        slack = 1e-9 * max(abs(self.max_actual_effort), 1.0)
        if not (
            self.min_actual_effort - slack
            <= self.mean_actual_effort
            <= self.max_actual_effort + slack
        ):
            raise ValueError("mean effort lies outside [min, max]")
        return self


class DatasetProfile(BaseModel):
    """Per-dataset ingestion defaults (column roles, units, categorical overrides)."""

    name: str
    aliases: List[str] = Field(default_factory=list)
    effort_column: str = "act_effort"
    id_column: Optional[str] = None
    size_column: Optional[str] = Field(
        None, description="KLOC column used by the adjusted COCOMO formula"
    )
    effort_unit: str = "person-months"
    categorical: Dict[str, List[str]] = Field(
        default_factory=dict,
        description="Numeric-looking attributes to treat as categorical, with terms",
    )
    units: Dict[str, str] = Field(
        default_factory=dict, description="Unit tags for numeric attributes"
    )


class DatasetSchemaFile(BaseModel):
    """JSON sidecar describing a headered CSV dataset."""

    name: str
    attributes: List[AttributeSchema]
    effort_column: str
    id_column: str = "id"
    size_column: Optional[str] = None
    effort_unit: str = "person-months"
    dropped_incomplete: int = 0
