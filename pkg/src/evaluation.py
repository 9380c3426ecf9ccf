"""
Leave-one-out evaluation and comparison against the published results.
"""

import logging
import math
from typing import Callable, Dict, List, Optional, Sequence

from tqdm import tqdm

from src.errors import EvaluationError, FuzzyAnalogyError, MetricError, UnknownDatasetError
from src.estimators import estimate, load_multipliers
from src.fuzzy import build_partitions
from src.models.dataset import Dataset, Project
from src.models.estimation import Estimate, EstimationConfig, EstimationMode
from src.models.evaluation import (
    ComparisonRow,
    ComparisonTable,
    EffortComparisonRow,
    EvaluationReport,
    ProjectRecord,
    ReferenceResults,
)
from src.models.fuzzy import FuzzyPartition
from src.references import REFERENCE_RESULTS

logger = logging.getLogger(__name__)

LOO_PROTOCOL = "leave-one-out"
LEAKY_LOO_PROTOCOL = "leave-one-out (leaky partitions)"

Estimator = Callable[
    [Project, Dataset, Dict[str, FuzzyPartition], EstimationConfig], Estimate
]
Metric = Callable[[Sequence[float]], float]


def mre(actual: float, estimated: float) -> float:
    """Magnitude of relative error, |actual - estimated| / actual."""
    if not actual > 0:
        raise MetricError(f"actual effort must be positive, got {actual}")
    return abs(actual - estimated) / actual


def mmre(mres: Sequence[float]) -> float:
    """Mean MRE as a percentage."""
    if len(mres) == 0:
        raise MetricError("MMRE of an empty list")
    return 100.0 * math.fsum(mres) / len(mres)


ACCURACY_METRICS: Dict[str, Metric] = {"mmre": mmre}


def register_metric(name: str, metric: Metric):
    """Add an accuracy metric over MRE lists; every later report carries it."""
    if name in ACCURACY_METRICS:
        raise EvaluationError(f"metric {name!r} is already registered")
    ACCURACY_METRICS[name] = metric


def _needs_partitions(config: EstimationConfig) -> bool:
    return config.mode in (EstimationMode.FUZZY_ANALOGY, EstimationMode.COCOMO_ADJUSTED)


def _partitions_for(training: Dataset, config: EstimationConfig):
    if not _needs_partitions(config):
        return {}
    return build_partitions(training, config.fuzzy, config.similarity.features)


def loo_evaluate(
    dataset: Dataset,
    config: Optional[EstimationConfig] = None,
    estimator: Optional[Estimator] = None,
    leaky: bool = False,
) -> EvaluationReport:
    """
    Leave-one-out evaluation of an estimator over `dataset`.

    Each project is estimated from the others, with partitions rebuilt on
    that training set. `leaky` builds partitions once on the full dataset.
    Estimator failures are recorded against the project and the run goes on.

    Args:
        dataset: At least two projects.
        config: Estimation settings, echoed into the report.
        estimator: Replaces `estimate`; called as
            estimator(project, training, partitions, config).
        leaky: Share one set of partitions across folds.

    Raises:
        EvaluationError: fewer than two projects, or every fold failed
    """
    config = config or EstimationConfig()
    if len(dataset) < 2:
        raise EvaluationError(f"{dataset.name}: leave-one-out needs at least 2 projects")

    if estimator is None:
        multipliers = None
        if config.mode == EstimationMode.COCOMO_ADJUSTED:
            multipliers = load_multipliers(config.multipliers_path)

        def estimator(project, training, partitions, fold_config):
            return estimate(project, training, partitions, fold_config, multipliers)

    shared = None
    if leaky:
        shared = _partitions_for(dataset, config)
        logger.info(f"{dataset.name}: sharing partitions across folds")

    records = []
    for i, project in enumerate(tqdm(dataset.projects, desc=dataset.name, disable=None)):
        training = dataset.without(i)
        try:
            partitions = shared if leaky else _partitions_for(training, config)
            result = estimator(project, training, partitions, config)
            records.append(
                ProjectRecord(
                    project_id=project.id,
                    actual=project.actual_effort,
                    estimated=result.value,
                    mre=mre(project.actual_effort, result.value),
                )
            )
        except FuzzyAnalogyError as e:
            logger.warning(f"{dataset.name}: fold {project.id} failed: {e}")
            records.append(
                ProjectRecord(project_id=project.id, actual=project.actual_effort, error=str(e))
            )

    succeeded = [record for record in records if record.succeeded]
    if not succeeded:
        raise EvaluationError(f"{dataset.name}: every fold failed")
    mres = [record.mre for record in succeeded]

    report = EvaluationReport(
        dataset=dataset.name,
        protocol=LEAKY_LOO_PROTOCOL if leaky else LOO_PROTOCOL,
        effort_unit=dataset.effort_unit,
        config=config.model_dump(mode="json"),
        records=records,
        mmre_percent=mmre(mres),
        metrics={name: metric(mres) for name, metric in ACCURACY_METRICS.items()},
        failure_count=len(records) - len(succeeded),
        mean_actual_effort=math.fsum(record.actual for record in succeeded)
        / len(succeeded),
        mean_estimated_effort=math.fsum(record.estimated for record in succeeded)
        / len(succeeded),
    )
    logger.info(
        f"{dataset.name}: MMRE {report.mmre_percent:.2f}% over {len(succeeded)} "
        f"projects ({report.failure_count} failed)"
    )
    return report


def _delta(value: float, reference: Optional[float]) -> Optional[float]:
    return None if reference is None else value - reference


def compare(
    reports: List[EvaluationReport],
    references: ReferenceResults = REFERENCE_RESULTS,
    strict: bool = True,
) -> ComparisonTable:
    """
    Computed MMRE and average efforts next to the published figures.

    Every reference row is kept whatever the reports cover. Computed rows
    carry their delta to the proposed method's published MMRE.

    Raises:
        UnknownDatasetError: a report's dataset has no published figures
            (strict only; otherwise its reference columns are None)
    """
    proposed = references.mmre_percent.get(references.proposed_method, {})
    rows = []
    efforts = []
    for report in reports:
        known = report.dataset in references.datasets
        if not known:
            if strict:
                raise UnknownDatasetError(
                    f"no published results for dataset {report.dataset!r}"
                )
            logger.info(f"{report.dataset}: no published results to compare against")
        method = report.config.get("mode", "computed")

        reference_mmre = proposed.get(report.dataset) if known else None
        rows.append(
            ComparisonRow(
                method=method,
                source="computed",
                dataset=report.dataset,
                mmre_percent=report.mmre_percent,
                reference_mmre_percent=reference_mmre,
                delta=_delta(report.mmre_percent, reference_mmre),
            )
        )

        reference_actual = references.actual_avg_effort.get(report.dataset) if known else None
        reference_estimated = (
            references.estimated_avg_effort.get(report.dataset) if known else None
        )
        efforts.append(
            EffortComparisonRow(
                dataset=report.dataset,
                method=method,
                actual_avg_effort=report.mean_actual_effort,
                estimated_avg_effort=report.mean_estimated_effort,
                reference_actual_avg_effort=reference_actual,
                reference_estimated_avg_effort=reference_estimated,
                actual_delta=_delta(report.mean_actual_effort, reference_actual),
                estimated_delta=_delta(report.mean_estimated_effort, reference_estimated),
            )
        )

    for method, by_dataset in references.mmre_percent.items():
        for dataset in references.datasets:
            if dataset in by_dataset:
                rows.append(
                    ComparisonRow(
                        method=method,
                        source="reference",
                        dataset=dataset,
                        mmre_percent=by_dataset[dataset],
                    )
                )
    return ComparisonTable(rows=rows, efforts=efforts)
