"""
Effort Estimators

Fuzzy-analogy case adaptation, the adjusted COCOMO formula, and the crisp
k-NN and dataset-mean baselines they are scored against.
"""

import json
import logging
import math
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np
from pydantic import PositiveFloat, TypeAdapter, ValidationError

from src.errors import (
    EmptyDatasetError,
    EstimationError,
    MissingValueError,
    ZeroSimilarityError,
)
from src.models.dataset import Dataset, Project
from src.models.estimation import (
    CocomoInputs,
    Contribution,
    Estimate,
    EstimationConfig,
    EstimationMode,
    Fallback,
)
from src.models.fuzzy import FuzzyPartition
from src.similarity import similarity_vector

logger = logging.getLogger(__name__)

MULTIPLIERS_PATH = Path(__file__).parent / "data" / "cocomo81_multipliers.json"

Multipliers = Dict[str, Dict[str, float]]
_multipliers_adapter = TypeAdapter(Dict[str, Dict[str, PositiveFloat]])


def load_multipliers(path: Optional[Union[str, Path]] = None) -> Multipliers:
    """
    Read an effort multiplier table: driver -> rating (vl..xh) -> multiplier.

    Defaults to the bundled COCOMO 81 intermediate table.
    """
    path = Path(path) if path else MULTIPLIERS_PATH
    try:
        table = _multipliers_adapter.validate_python(
            json.loads(path.read_text(encoding="utf-8"))
        )
    except (OSError, ValueError, ValidationError) as e:
        raise EstimationError(f"cannot read multiplier table {path}: {e}") from e
    return {driver.lower(): ratings for driver, ratings in table.items()}


def _uniform(projects: List[Project]) -> List[Contribution]:
    weight = 1.0 / len(projects)
    return [Contribution(project_id=project.id, weight=weight) for project in projects]


def estimate_dataset_mean(dataset: Dataset) -> float:
    if not dataset.projects:
        raise EmptyDatasetError(f"{dataset.name}: dataset is empty")
    return math.fsum(dataset.efforts) / len(dataset)


def estimate_fuzzy_analogy(
    new_project: Project,
    dataset: Dataset,
    partitions: Dict[str, FuzzyPartition],
    config: Optional[EstimationConfig] = None,
) -> Estimate:
    """
    Similarity-weighted mean of every historical effort.

    Each case contributes in proportion to its similarity with the new
    project (raised to `weight_power`). When no case is similar at all the
    configured fallback applies.

    Raises:
        EmptyDatasetError: no cases
        ZeroSimilarityError: zero total similarity with fallback=error
    """
    config = config or EstimationConfig()
    if not dataset.projects:
        raise EmptyDatasetError(f"{dataset.name}: dataset is empty")

    sims = similarity_vector(new_project, dataset.projects, partitions, config.similarity)
    if config.weight_power != 1.0:
        sims = sims**config.weight_power
    efforts = np.asarray(dataset.efforts, dtype=float)
    total = float(sims.sum())

    if total <= 0.0:
        if config.fallback == Fallback.ERROR:
            raise ZeroSimilarityError(
                f"{new_project.id}: no case in {dataset.name} is similar"
            )
        logger.warning(f"{new_project.id}: zero total similarity, using dataset mean")
        return Estimate(
            value=estimate_dataset_mean(dataset),
            mode=EstimationMode.FUZZY_ANALOGY,
            contributions=_uniform(dataset.projects),
            fallback_used=True,
        )

    value = float(np.dot(sims, efforts)) / total
    # rounding can push a convex combination past the hull
    value = min(max(value, float(efforts.min())), float(efforts.max()))
    contributions = [
        Contribution(project_id=project.id, weight=float(sim) / total)
        for project, sim in zip(dataset.projects, sims)
    ]
    return Estimate(
        value=value, mode=EstimationMode.FUZZY_ANALOGY, contributions=contributions
    )


def estimate_cocomo_adjusted(
    inputs: CocomoInputs, a: float = 2.94, b: float = 0.91
) -> float:
    """Effort = a * size ** (b + 0.01 * sum(distances)) * prod(multipliers)."""
    if not inputs.size > 0:
        raise EstimationError(f"size must be positive, got {inputs.size}")
    exponent = b + 0.01 * math.fsum(inputs.distances)
    return a * inputs.size**exponent * math.prod(inputs.effort_multipliers)


def effort_multipliers_for(project: Project, multipliers: Multipliers) -> List[float]:
    """Multipliers for every rated cost driver the project carries."""
    found = []
    for name, value in project.values.items():
        table = multipliers.get(name.lower())
        if table is None or not isinstance(value, str):
            continue
        multiplier = table.get(value)
        if multiplier is None:
            logger.debug(f"{project.id}: no multiplier for {name}={value}, using 1.0")
            multiplier = 1.0
        found.append(multiplier)
    return found


def _top_k(sims: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k highest scores; ties keep dataset order."""
    return np.argsort(-sims, kind="stable")[:k]


def estimate_cocomo_for_project(
    new_project: Project,
    dataset: Dataset,
    partitions: Dict[str, FuzzyPartition],
    config: Optional[EstimationConfig] = None,
    multipliers: Optional[Multipliers] = None,
) -> Estimate:
    """
    Adjusted COCOMO estimate for a project with a KLOC size and rated drivers.

    The distances are 1 - similarity to each of the `k` most similar cases.
    """
    config = config or EstimationConfig()
    if not dataset.projects:
        raise EmptyDatasetError(f"{dataset.name}: dataset is empty")
    if dataset.size_column is None:
        raise EstimationError(f"{dataset.name} has no size column for COCOMO")
    size = new_project.values.get(dataset.size_column)
    if size is None:
        raise MissingValueError(dataset.size_column, new_project.id)

    sims = similarity_vector(new_project, dataset.projects, partitions, config.similarity)
    top = _top_k(sims, config.k)
    if multipliers is None:
        multipliers = load_multipliers(config.multipliers_path)
    inputs = CocomoInputs(
        size=size,
        distances=[1.0 - float(sims[i]) for i in top],
        effort_multipliers=effort_multipliers_for(new_project, multipliers),
    )
    value = estimate_cocomo_adjusted(inputs, config.a, config.b)

    analogs = [dataset.projects[i] for i in top]
    total = float(sims[top].sum())
    if total > 0.0:
        contributions = [
            Contribution(project_id=dataset.projects[i].id, weight=float(sims[i]) / total)
            for i in top
        ]
    else:
        contributions = _uniform(analogs)
    return Estimate(
        value=value, mode=EstimationMode.COCOMO_ADJUSTED, contributions=contributions
    )


def crisp_similarities(
    new_project: Project, dataset: Dataset, features: Optional[List[str]] = None
) -> np.ndarray:
    """
    Classical analogy similarity to every case.

    Categorical features score 1 on an exact match and 0 otherwise; numeric
    features score 1 - |a - b| / (max - min) over the dataset's range.
    """
    names = features if features is not None else dataset.attribute_names
    if not names:
        raise EstimationError("no features selected for crisp analogy")
    unknown = [name for name in names if name not in dataset.attribute_names]
    if unknown:
        raise EstimationError(f"unknown features {unknown} for {dataset.name}")
    scores = []
    for name in names:
        attribute = dataset.attribute(name)
        target = new_project.values.get(name)
        if target is None:
            raise MissingValueError(name, new_project.id)
        column = []
        for project in dataset.projects:
            value = project.values[name]
            if value is None:
                raise MissingValueError(name, project.id)
            column.append(value)

        if attribute.is_categorical:
            scores.append(np.asarray([1.0 if v == target else 0.0 for v in column]))
            continue
        values = np.asarray(column, dtype=float)
        spread = float(values.max() - values.min())
        if spread == 0.0:
            scores.append((values == target).astype(float))
        else:
            scores.append(np.clip(1.0 - np.abs(values - target) / spread, 0.0, 1.0))
    return np.vstack(scores).sum(axis=0) / len(names)


def estimate_crisp_knn(
    new_project: Project,
    dataset: Dataset,
    k: int = 3,
    features: Optional[List[str]] = None,
) -> Estimate:
    """Mean effort of the k most similar cases under crisp similarity."""
    if not dataset.projects:
        raise EmptyDatasetError(f"{dataset.name}: dataset is empty")
    if k > len(dataset):
        raise EstimationError(f"k={k} exceeds the {len(dataset)} available cases")

    sims = crisp_similarities(new_project, dataset, features)
    neighbours = [dataset.projects[i] for i in _top_k(sims, k)]
    value = math.fsum(project.actual_effort for project in neighbours) / k
    return Estimate(
        value=value, mode=EstimationMode.CRISP_KNN, contributions=_uniform(neighbours)
    )


def estimate(
    new_project: Project,
    dataset: Dataset,
    partitions: Dict[str, FuzzyPartition],
    config: Optional[EstimationConfig] = None,
    multipliers: Optional[Multipliers] = None,
) -> Estimate:
    """Estimate with whichever mode `config` selects."""
    config = config or EstimationConfig()
    if config.mode == EstimationMode.FUZZY_ANALOGY:
        return estimate_fuzzy_analogy(new_project, dataset, partitions, config)
    if config.mode == EstimationMode.COCOMO_ADJUSTED:
        return estimate_cocomo_for_project(
            new_project, dataset, partitions, config, multipliers
        )
    if config.mode == EstimationMode.CRISP_KNN:
        return estimate_crisp_knn(
            new_project, dataset, config.k, config.similarity.features
        )
    return Estimate(
        value=estimate_dataset_mean(dataset),
        mode=EstimationMode.DATASET_MEAN,
        contributions=_uniform(dataset.projects),
    )
