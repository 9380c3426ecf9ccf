from pathlib import Path
from typing import Any, Dict, List

from prefect import task

from src.datasets import drop_incomplete, load_dataset
from src.evaluation import compare, loo_evaluate
from src.models.config import DatasetSource, RunConfig
from src.models.dataset import Dataset
from src.models.evaluation import ComparisonTable, EvaluationReport
from src.reports import write_comparison, write_report


@task
def load_complete_dataset(source: DatasetSource) -> Dataset:
    dataset = load_dataset(source.path, name=source.name, schema_path=source.schema_path)
    complete = drop_incomplete(dataset)
    print(
        f"Loaded {dataset.name}: {len(complete)} complete projects "
        f"({complete.dropped_incomplete} dropped)"
    )
    return complete


@task
def evaluate_dataset(dataset: Dataset, config: RunConfig) -> EvaluationReport:
    report = loo_evaluate(dataset, config.estimation, leaky=config.leaky_partitions)
    print(f"{dataset.name}: MMRE {report.mmre_percent:.2f}% ({report.failure_count} failed)")
    return report


@task
def write_evaluation(
    reports: List[EvaluationReport], config: RunConfig
) -> ComparisonTable:
    echo: Dict[str, Any] = config.echo()
    out_dir = Path(config.output_dir)
    for report in reports:
        write_report(report, out_dir, echo, config.formats)
    table = compare(reports, strict=False)
    written = write_comparison(table, out_dir, echo, config.formats)
    print(f"Wrote {len(written)} comparison files to {out_dir}")
    return table
