"""
Exception hierarchy shared by every stage of the estimation pipeline.

The CLI maps these onto its exit codes, so callers should raise the most
specific class available.
"""

from typing import Optional


class FuzzyAnalogyError(Exception):
    """Base class for all pipeline errors."""


class DatasetError(FuzzyAnalogyError):
    """Problems reading or validating a historical dataset."""


class DatasetParseError(DatasetError):
    """Malformed ARFF/CSV input."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SchemaError(DatasetError):
    """A value or project does not conform to the attribute schema."""


class EmptyDatasetError(DatasetError):
    pass


class NoUsableCasesError(DatasetError):
    """Cleaning removed every project."""


class FuzzyModelError(FuzzyAnalogyError):
    pass


class DegenerateAxisError(FuzzyModelError):
    """Cannot partition an axis with fewer than two distinct values."""


class CoverageError(FuzzyModelError):
    """A value falls outside every fuzzy set of a partition."""


class UnknownLabelError(FuzzyModelError):
    pass


class SimilarityError(FuzzyAnalogyError):
    pass


class VectorLengthError(SimilarityError):
    pass


class MissingValueError(SimilarityError):
    def __init__(self, feature: str, project_id: str):
        self.feature = feature
        self.project_id = project_id
        super().__init__(f"project {project_id!r} has no value for feature {feature!r}")


class EstimationError(FuzzyAnalogyError):
    pass


class ZeroSimilarityError(EstimationError):
    """Every historical case has zero similarity to the query."""


class EvaluationError(FuzzyAnalogyError):
    pass


class MetricError(EvaluationError):
    pass


class UnknownDatasetError(EvaluationError):
    pass
