"""
Fuzzy similarity between projects.

Per-attribute similarity compares two membership vectors by max-min or
sum-product aggregation; the per-attribute scores are then combined into one
project similarity.
"""

import logging
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from src.errors import MissingValueError, SimilarityError, VectorLengthError
from src.fuzzy import fuzzify, membership_matrix
from src.models.dataset import Dataset, Project
from src.models.estimation import (
    Aggregation,
    Combination,
    Normalization,
    SimilarityConfig,
    SimilarityMatrix,
)
from src.models.fuzzy import FuzzyPartition, MembershipVector

logger = logging.getLogger(__name__)


def _aggregate(
    a: np.ndarray,
    b: np.ndarray,
    aggregation: Aggregation,
    normalization: Normalization,
) -> np.ndarray:
    """Aggregate along the last axis (the partition's sets); broadcasts."""
    if Aggregation(aggregation) == Aggregation.MAX_MIN:
        return np.minimum(a, b).max(axis=-1)
    scores = (a * b).sum(axis=-1)
    if Normalization(normalization) == Normalization.CLAMPED:
        scores = np.minimum(scores, 1.0)
    return scores


def combine(scores: np.ndarray, combination: Combination) -> np.ndarray:
    """Merge per-attribute scores stacked along axis 0."""
    scores = np.asarray(scores, dtype=float)
    combination = Combination(combination)
    if combination == Combination.MINIMUM:
        return scores.min(axis=0)
    if combination == Combination.PRODUCT:
        return scores.prod(axis=0)
    return scores.sum(axis=0) / scores.shape[0]


def attr_similarity(
    mv1: MembershipVector,
    mv2: MembershipVector,
    aggregation: Aggregation = Aggregation.MAX_MIN,
    normalization: Normalization = Normalization.CLAMPED,
) -> float:
    """
    Similarity of two values of one attribute.

    max_min: max over sets of min(grade1, grade2).
    sum_product: sum over sets of grade1 * grade2, clamped at 1 unless raw.
    """
    if len(mv1) != len(mv2):
        raise VectorLengthError(
            f"membership vectors differ in length ({len(mv1)} vs {len(mv2)})"
        )
    return float(
        _aggregate(np.asarray(mv1.grades), np.asarray(mv2.grades), aggregation, normalization)
    )


def selected_features(
    partitions: Dict[str, FuzzyPartition], config: SimilarityConfig
) -> List[str]:
    features = config.features if config.features is not None else list(partitions)
    if not features:
        raise SimilarityError("no features selected for similarity")
    absent = [name for name in features if name not in partitions]
    if absent:
        raise SimilarityError(f"no fuzzy partition for features {absent}")
    return features


def project_similarity(
    p1: Project,
    p2: Project,
    partitions: Dict[str, FuzzyPartition],
    config: Optional[SimilarityConfig] = None,
) -> float:
    """
    Overall similarity of two projects over the selected features.

    Raises:
        MissingValueError: either project lacks a selected feature
    """
    config = config or SimilarityConfig()
    scores = []
    for name in selected_features(partitions, config):
        for project in (p1, p2):
            if project.values.get(name) is None:
                raise MissingValueError(name, project.id)
        partition = partitions[name]
        scores.append(
            attr_similarity(
                fuzzify(p1.values[name], partition),
                fuzzify(p2.values[name], partition),
                config.aggregation,
                config.normalization,
            )
        )
    return float(combine(np.asarray(scores), config.combination))


def _column(projects: Sequence[Project], name: str) -> list:
    column = []
    for project in projects:
        value = project.values.get(name)
        if value is None:
            raise MissingValueError(name, project.id)
        column.append(value)
    return column


def similarity_vector(
    query: Project,
    projects: Sequence[Project],
    partitions: Dict[str, FuzzyPartition],
    config: Optional[SimilarityConfig] = None,
) -> np.ndarray:
    """Similarity of `query` to each of `projects`, in their order."""
    config = config or SimilarityConfig()
    stacked = []
    for name in selected_features(partitions, config):
        partition = partitions[name]
        cases = membership_matrix(_column(projects, name), partition)
        target = membership_matrix(_column([query], name), partition)[0]
        stacked.append(_aggregate(cases, target, config.aggregation, config.normalization))
    return combine(np.vstack(stacked), config.combination)


def similarity_matrix(
    dataset: Dataset,
    partitions: Dict[str, FuzzyPartition],
    config: Optional[SimilarityConfig] = None,
) -> SimilarityMatrix:
    """
    All pairwise project similarities of a dataset.

    The upper triangle is computed and mirrored, so the matrix is exactly
    symmetric.
    """
    config = config or SimilarityConfig()
    stacked = []
    for name in selected_features(partitions, config):
        grades = membership_matrix(_column(dataset.projects, name), partitions[name])
        stacked.append(
            _aggregate(
                grades[:, None, :],
                grades[None, :, :],
                config.aggregation,
                config.normalization,
            )
        )
    scores = combine(np.stack(stacked), config.combination)
    upper = np.triu(scores)
    scores = upper + np.triu(scores, k=1).T
    logger.debug(f"Computed {len(dataset)}x{len(dataset)} similarity matrix")
    return SimilarityMatrix(
        project_ids=[project.id for project in dataset.projects],
        scores=scores.tolist(),
    )


def similarity_matrix_to_csv(matrix: SimilarityMatrix) -> str:
    frame = pd.DataFrame(
        matrix.scores, index=matrix.project_ids, columns=matrix.project_ids
    )
    return frame.to_csv(float_format="%.6f", index_label="project_id", lineterminator="\n")
