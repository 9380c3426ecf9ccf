"""
Fuzzy Set Models Module

Piecewise-linear fuzzy sets, the partitions that cover one attribute axis,
and membership vectors produced by fuzzification.
"""

from enum import Enum
from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class Shape(str, Enum):
    SINGLETON = "singleton"
    TRIANGULAR = "triangular"
    TRAPEZOIDAL = "trapezoidal"


class Axis(str, Enum):
    """Universe a partition lives on."""

    VALUE = "value"
    TERM_INDEX = "term_index"


class PartitionMethod(str, Enum):
    UNIFORM = "uniform"
    QUANTILE = "quantile"


class FuzzySet(BaseModel):
    """
    A linguistic term with a piecewise-linear membership function.

    Membership is interpolated linearly between breakpoints and held constant
    beyond the first and last one. A singleton is a point mass at its only
    breakpoint.
    """

    model_config = ConfigDict(frozen=True)

    label: str
    shape: Shape
    breakpoints: List[Tuple[float, float]]

    @field_validator("breakpoints")
    @classmethod
    def check_breakpoints(cls, v):
        if not v:
            raise ValueError("a fuzzy set needs at least one breakpoint")
        xs = [x for x, _ in v]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("breakpoints must be strictly increasing in x")
        if any(not 0.0 <= mu <= 1.0 for _, mu in v):
            raise ValueError("membership grades must lie in [0, 1]")
        if max(mu for _, mu in v) != 1.0:
            raise ValueError("fuzzy set is not normal (no breakpoint reaches 1)")
        return v

    @model_validator(mode="after")
    def check_shape(self):
        if self.shape == Shape.SINGLETON and len(self.breakpoints) != 1:
            raise ValueError("a singleton has exactly one breakpoint")
        if self.shape != Shape.SINGLETON and len(self.breakpoints) < 2:
            raise ValueError(f"a {self.shape.value} set needs two or more breakpoints")
        return self

    @property
    def peak(self) -> float:
        """Smallest breakpoint x with full membership."""
        return next(x for x, mu in self.breakpoints if mu == 1.0)

    @classmethod
    def singleton(cls, label: str, x: float) -> "FuzzySet":
        return cls(label=label, shape=Shape.SINGLETON, breakpoints=[(x, 1.0)])

    @classmethod
    def triangular(cls, label: str, a: float, b: float, c: float) -> "FuzzySet":
        return cls(
            label=label,
            shape=Shape.TRIANGULAR,
            breakpoints=[(a, 0.0), (b, 1.0), (c, 0.0)],
        )

    @classmethod
    def trapezoidal(
        cls, label: str, a: float, b: float, c: float, d: float
    ) -> "FuzzySet":
        return cls(
            label=label,
            shape=Shape.TRAPEZOIDAL,
            breakpoints=[(a, 0.0), (b, 1.0), (c, 1.0), (d, 0.0)],
        )

    @classmethod
    def left_shoulder(cls, label: str, peak: float, right: float) -> "FuzzySet":
        """Full membership up to `peak`, falling to 0 at `right`."""
        return cls(
            label=label,
            shape=Shape.TRAPEZOIDAL,
            breakpoints=[(peak, 1.0), (right, 0.0)],
        )

    @classmethod
    def right_shoulder(cls, label: str, left: float, peak: float) -> "FuzzySet":
        """Rising from 0 at `left`, full membership from `peak` on."""
        return cls(
            label=label,
            shape=Shape.TRAPEZOIDAL,
            breakpoints=[(left, 0.0), (peak, 1.0)],
        )


class FuzzyPartition(BaseModel):
    """The ordered family of fuzzy sets describing one attribute."""

    model_config = ConfigDict(frozen=True)

    attribute: str
    axis: Axis
    sets: List[FuzzySet]

    @model_validator(mode="after")
    def check_geometry(self):
        if not self.sets:
            raise ValueError(f"partition of {self.attribute!r} has no sets")
        labels = self.labels
        if len(set(labels)) != len(labels):
            raise ValueError(f"partition of {self.attribute!r} repeats a label")
        peaks = self.peaks
        if any(b <= a for a, b in zip(peaks, peaks[1:])):
            raise ValueError(f"peaks of {self.attribute!r} must be strictly increasing")
        return self

    @property
    def labels(self) -> List[str]:
        return [fuzzy_set.label for fuzzy_set in self.sets]

    @property
    def peaks(self) -> List[float]:
        return [fuzzy_set.peak for fuzzy_set in self.sets]

    def __len__(self) -> int:
        return len(self.sets)


class MembershipVector(BaseModel):
    """Grades of one value against every set of a partition, in partition order."""

    model_config = ConfigDict(frozen=True)

    grades: List[float]

    @field_validator("grades")
    @classmethod
    def check_grades(cls, v):
        if any(not 0.0 <= grade <= 1.0 for grade in v):
            raise ValueError("membership grades must lie in [0, 1]")
        if not any(grade > 0.0 for grade in v):
            raise ValueError("membership vector has no positive grade")
        return v

    def __len__(self) -> int:
        return len(self.grades)


class FuzzyConfig(BaseModel):
    k_sets: int = Field(5, ge=2, description="Fuzzy sets per numeric attribute")
    method: PartitionMethod = PartitionMethod.QUANTILE
    overlap: float = Field(
        1.5, gt=0, description="Half-width of categorical term sets on the index axis"
    )
