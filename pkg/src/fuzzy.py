"""
Fuzzification of project attributes.

Numeric values are treated as singletons and graded against a partition of the
attribute's observed range; categorical ratings are graded against triangular
sets laid out on the term-index axis.
"""

import logging
from typing import Dict, List, Optional, Sequence

import numpy as np

from src.errors import (
    CoverageError,
    DegenerateAxisError,
    FuzzyModelError,
    UnknownLabelError,
)
from src.models.dataset import Dataset
from src.models.fuzzy import (
    Axis,
    FuzzyConfig,
    FuzzyPartition,
    FuzzySet,
    MembershipVector,
    PartitionMethod,
    Shape,
)

logger = logging.getLogger(__name__)


def membership(fuzzy_set: FuzzySet, x: float) -> float:
    """Grade of `x` in `fuzzy_set`: linear between breakpoints, constant outside."""
    if fuzzy_set.shape == Shape.SINGLETON:
        return 1.0 if x == fuzzy_set.breakpoints[0][0] else 0.0
    xs, mus = zip(*fuzzy_set.breakpoints)
    return float(np.interp(x, xs, mus))


def membership_grades(fuzzy_set: FuzzySet, xs: np.ndarray) -> np.ndarray:
    """Vectorized `membership` over an array of points."""
    xs = np.asarray(xs, dtype=float)
    if fuzzy_set.shape == Shape.SINGLETON:
        return (xs == fuzzy_set.breakpoints[0][0]).astype(float)
    points, mus = zip(*fuzzy_set.breakpoints)
    return np.interp(xs, points, mus)


def _partition_from_peaks(attribute: str, peaks: Sequence[float]) -> FuzzyPartition:
    """Triangles meeting at their neighbours' peaks, shouldered at both ends."""
    peaks = [float(peak) for peak in peaks]
    last = len(peaks) - 1
    sets = []
    for i, peak in enumerate(peaks):
        label = f"{attribute}:{i}"
        if i == 0:
            sets.append(FuzzySet.left_shoulder(label, peak, peaks[1]))
        elif i == last:
            sets.append(FuzzySet.right_shoulder(label, peaks[i - 1], peak))
        else:
            sets.append(FuzzySet.triangular(label, peaks[i - 1], peak, peaks[i + 1]))
    return FuzzyPartition(attribute=attribute, axis=Axis.VALUE, sets=sets)


def build_numeric_partition(
    values: Sequence[float],
    k: int,
    method: PartitionMethod = PartitionMethod.QUANTILE,
    attribute: str = "value",
) -> FuzzyPartition:
    """
    Partition a numeric axis into `k` triangular fuzzy sets.

    Uniform places the peaks evenly from min to max. Quantile places them at the
    midpoints of `k` equal-frequency bins; coinciding quantiles are merged, so a
    heavily tied column can yield fewer than `k` sets.

    Raises:
        FuzzyModelError: k < 2
        DegenerateAxisError: fewer than two distinct values
    """
    if k < 2:
        raise FuzzyModelError(f"{attribute}: a partition needs at least 2 sets, got {k}")
    data = np.asarray(values, dtype=float)
    data = data[~np.isnan(data)]
    if np.unique(data).size < 2:
        raise DegenerateAxisError(f"{attribute}: all values are equal")

    method = PartitionMethod(method)
    if method == PartitionMethod.QUANTILE:
        peaks = np.unique(np.quantile(data, (np.arange(k) + 0.5) / k))
        if peaks.size < k:
            logger.warning(
                f"{attribute}: {k - peaks.size} quantile peaks coincide, "
                f"using {peaks.size} sets"
            )
        if peaks.size < 2:
            logger.warning(f"{attribute}: quantiles collapse, falling back to uniform")
            method = PartitionMethod.UNIFORM
    if method == PartitionMethod.UNIFORM:
        peaks = np.unique(np.linspace(data.min(), data.max(), k))

    return _partition_from_peaks(attribute, peaks)


def build_categorical_partition(
    attribute: str, terms: Sequence[str], overlap: float = 1.5
) -> FuzzyPartition:
    """
    One triangular set per term, centred on the term's index.

    With half-width `overlap` = 1 the terms are crisp; wider sets give adjacent
    terms a grade of 1 - 1/overlap.
    """
    if overlap <= 0:
        raise FuzzyModelError(f"{attribute}: overlap must be positive")
    sets = [
        FuzzySet.triangular(term, index - overlap, index, index + overlap)
        for index, term in enumerate(terms)
    ]
    return FuzzyPartition(attribute=attribute, axis=Axis.TERM_INDEX, sets=sets)


def _checked_vector(grades: List[float], partition: FuzzyPartition, value) -> MembershipVector:
    if not any(grade > 0.0 for grade in grades):
        raise CoverageError(
            f"{partition.attribute}: {value!r} lies outside every fuzzy set"
        )
    return MembershipVector(grades=grades)


def fuzzify_numeric(x: float, partition: FuzzyPartition) -> MembershipVector:
    """Grade the singleton at `x` against every set of a value-axis partition."""
    if partition.axis != Axis.VALUE:
        raise FuzzyModelError(f"{partition.attribute}: not a numeric partition")
    grades = [membership(fuzzy_set, x) for fuzzy_set in partition.sets]
    return _checked_vector(grades, partition, x)


def fuzzify_categorical(label: str, partition: FuzzyPartition) -> MembershipVector:
    if partition.axis != Axis.TERM_INDEX:
        raise FuzzyModelError(f"{partition.attribute}: not a categorical partition")
    try:
        index = partition.labels.index(label)
    except ValueError:
        raise UnknownLabelError(f"{partition.attribute}: unknown label {label!r}")
    grades = [membership(fuzzy_set, float(index)) for fuzzy_set in partition.sets]
    return _checked_vector(grades, partition, label)


def fuzzify(value, partition: FuzzyPartition) -> MembershipVector:
    if partition.axis == Axis.VALUE:
        return fuzzify_numeric(float(value), partition)
    return fuzzify_categorical(value, partition)


def membership_matrix(values: Sequence, partition: FuzzyPartition) -> np.ndarray:
    """
    Fuzzify many values at once.

    Returns:
        An (n, K) array whose rows equal `fuzzify(value, partition).grades`.
    """
    if partition.axis == Axis.VALUE:
        points = np.asarray(values, dtype=float)
    else:
        labels = partition.labels
        try:
            points = np.asarray([labels.index(value) for value in values], dtype=float)
        except ValueError:
            unknown = next(value for value in values if value not in labels)
            raise UnknownLabelError(f"{partition.attribute}: unknown label {unknown!r}")

    grades = np.column_stack(
        [membership_grades(fuzzy_set, points) for fuzzy_set in partition.sets]
    ).reshape(len(points), len(partition))
    uncovered = ~(grades > 0.0).any(axis=1)
    if uncovered.any():
        value = list(values)[int(np.argmax(uncovered))]
        raise CoverageError(
            f"{partition.attribute}: {value!r} lies outside every fuzzy set"
        )
    return grades


def build_partitions(
    dataset: Dataset,
    config: Optional[FuzzyConfig] = None,
    features: Optional[List[str]] = None,
) -> Dict[str, FuzzyPartition]:
    """
    Build one partition per attribute of `dataset`.

    Numeric partitions use the non-missing values of the dataset's own
    projects. Degenerate numeric attributes are skipped with a warning unless
    they were selected explicitly through `features`.
    """
    config = config or FuzzyConfig()
    names = features if features is not None else dataset.attribute_names
    partitions = {}
    for name in names:
        try:
            attribute = dataset.attribute(name)
        except KeyError:
            raise FuzzyModelError(f"unknown feature {name!r} for {dataset.name}")
        if attribute.is_categorical:
            partitions[name] = build_categorical_partition(
                name, attribute.terms, config.overlap
            )
            continue
        values = [
            project.values[name]
            for project in dataset.projects
            if project.values[name] is not None
        ]
        try:
            partitions[name] = build_numeric_partition(
                values, config.k_sets, config.method, attribute=name
            )
        except DegenerateAxisError:
            if features is not None:
                raise
            logger.warning(f"{dataset.name}: skipping constant attribute {name!r}")
    logger.debug(f"Built {len(partitions)} partitions for {dataset.name}")
    return partitions
