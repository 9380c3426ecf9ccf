"""
Command line for fuzzy-analogy effort estimation.

    fuzzy-analogy summarize --dataset data/nasa93.arff
    fuzzy-analogy estimate --dataset data/nasa60.arff --query query.json
    fuzzy-analogy evaluate --dataset data/nasa60.arff --dataset data/nasa93.arff
    fuzzy-analogy similarity --dataset data/desharnais.arff

Exit codes: 0 success, 1 usage error, 2 data error, 3 evaluation failure.
"""

import json
import logging
import os
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, List, Optional

import click
import pandas as pd
from dotenv import load_dotenv
from pydantic import ValidationError
from rich.console import Console
from rich.markup import escape
from rich.table import Table

from src.datasets import drop_incomplete, load_dataset, project_from_mapping, summarize
from src.errors import EvaluationError, FuzzyAnalogyError
from src.estimators import estimate as run_estimate
from src.evaluation import compare, loo_evaluate
from src.fuzzy import build_partitions
from src.models.config import DatasetSource, OutputFormat, RunConfig
from src.models.dataset import Dataset
from src.models.estimation import EstimationMode
from src.reports import (
    write_comparison,
    write_estimate,
    write_report,
    write_similarity,
    write_summary,
)
from src.similarity import similarity_matrix

logger = logging.getLogger(__name__)

console = Console(soft_wrap=True)
err_console = Console(stderr=True, soft_wrap=True)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_EVALUATION = 3

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR"]


class DataError(click.ClickException):
    exit_code = EXIT_DATA


class EvaluationFailed(click.ClickException):
    exit_code = EXIT_EVALUATION


class FuzzyAnalogyGroup(click.Group):
    """Click group with this tool's exit code contract."""

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            rv = super().main(
                args=args,
                prog_name=prog_name,
                complete_var=complete_var,
                standalone_mode=False,
                **extra,
            )
        except click.UsageError as e:
            e.show()
            sys.exit(EXIT_USAGE)
        except click.ClickException as e:
            e.show()
            sys.exit(e.exit_code)
        except click.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(EXIT_USAGE)
        sys.exit(rv if isinstance(rv, int) else EXIT_OK)


@contextmanager
def data_errors():
    """Surface pipeline and validation errors as data errors (exit 2)."""
    try:
        yield
    except EvaluationError as e:
        raise EvaluationFailed(str(e)) from e
    except (FuzzyAnalogyError, ValidationError, OSError, ValueError) as e:
        raise DataError(str(e)) from e


def _dashed(value: Optional[str]) -> Optional[str]:
    return value.replace("-", "_") if value is not None else None


def _set(tree: Dict[str, Any], dotted: str, value: Any):
    *parents, leaf = dotted.split(".")
    for key in parents:
        tree = tree.setdefault(key, {})
    tree[leaf] = value


def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def resolve_config(
    config_path: Optional[str] = None,
    datasets: Optional[List[str]] = None,
    schema: Optional[str] = None,
    name: Optional[str] = None,
    **flags,
) -> RunConfig:
    """
    Effective run configuration.

    Flags override the JSON config file, which overrides environment
    defaults (FUZZY_ANALOGY_OUT), which override the built-in defaults.
    """
    tree: Dict[str, Any] = {}
    env_out = os.getenv("FUZZY_ANALOGY_OUT")
    if env_out:
        tree["output_dir"] = env_out

    if config_path:
        path = Path(config_path)
        if not path.exists():
            raise DataError(f"config file not found: {path}")
        try:
            with open(path, "r", encoding="utf-8") as f:
                tree = _merge(tree, json.load(f))
        except json.JSONDecodeError as e:
            raise DataError(f"invalid config file {path}: {e}")

    if datasets:
        if (schema or name) and len(datasets) > 1:
            raise click.UsageError("--schema and --name apply to a single --dataset")
        tree["datasets"] = [
            {"path": path, "name": name, "schema_path": schema} for path in datasets
        ]

    overrides = {
        "estimation.similarity.features": flags.get("features"),
        "estimation.fuzzy.k_sets": flags.get("k_sets"),
        "estimation.fuzzy.method": flags.get("partition_method"),
        "estimation.fuzzy.overlap": flags.get("overlap"),
        "estimation.similarity.aggregation": _dashed(flags.get("aggregation")),
        "estimation.similarity.combination": _dashed(flags.get("combination")),
        "estimation.similarity.normalization": _dashed(flags.get("normalization")),
        "estimation.mode": _dashed(flags.get("mode")),
        "estimation.a": flags.get("a"),
        "estimation.b": flags.get("b"),
        "estimation.k": flags.get("knn_k"),
        "estimation.fallback": _dashed(flags.get("fallback")),
        "estimation.weight_power": flags.get("weight_power"),
        "estimation.multipliers_path": flags.get("multipliers"),
        "output_dir": flags.get("out"),
    }
    for dotted, value in overrides.items():
        if value is not None:
            _set(tree, dotted, value)
    if flags.get("drop_incomplete"):
        tree["drop_incomplete"] = True
    if flags.get("leaky"):
        tree["leaky_partitions"] = True
    if flags.get("formats"):
        tree["formats"] = list(flags["formats"])

    try:
        config = RunConfig.model_validate(tree)
    except ValidationError as e:
        raise DataError(f"invalid configuration: {e}")
    if not config.datasets:
        raise click.UsageError("no dataset given (use --dataset or a config file)")
    return config


def _features(ctx, param, value):
    if value is None:
        return None
    features = [feature.strip() for feature in value.split(",") if feature.strip()]
    if not features:
        raise click.BadParameter("expected a comma-separated list of attributes")
    return features


def run_options(command):
    """Options shared by every command."""
    options = [
        click.option("--dataset", "datasets", multiple=True, help="ARFF or CSV dataset file"),
        click.option("--schema", default=None, help="JSON schema sidecar for CSV input"),
        click.option("--name", default=None, help="Dataset name (selects the built-in profile)"),
        click.option("--config", "config_path", default=None, help="JSON file mirroring RunConfig"),
        click.option("--features", callback=_features, help="Comma-separated attribute subset"),
        click.option("--k-sets", type=click.IntRange(min=2), help="Fuzzy sets per numeric attribute"),
        click.option("--partition-method", type=click.Choice(["quantile", "uniform"])),
        click.option("--overlap", type=float, help="Half-width of categorical fuzzy sets"),
        click.option("--aggregation", type=click.Choice(["max-min", "sum-product"])),
        click.option(
            "--combination", type=click.Choice(["arithmetic-mean", "minimum", "product"])
        ),
        click.option("--normalization", type=click.Choice(["raw", "clamped-at-1"])),
        click.option(
            "--mode",
            type=click.Choice(["fuzzy-analogy", "cocomo-adjusted", "crisp-knn", "dataset-mean"]),
        ),
        click.option("--A", "a", type=float, help="COCOMO multiplicative constant"),
        click.option("--B", "b", type=float, help="COCOMO exponent base"),
        click.option("--knn-k", type=click.IntRange(min=1), help="Neighbours for k-NN and COCOMO"),
        click.option("--fallback", type=click.Choice(["dataset-mean", "error"])),
        click.option("--weight-power", type=float, help="Exponent applied to similarities"),
        click.option("--multipliers", default=None, help="Effort multiplier table (JSON)"),
        click.option("--drop-incomplete", is_flag=True, help="Drop projects with missing values"),
        click.option("--leaky", is_flag=True, help="Share partitions across LOO folds"),
        click.option("--out", default=None, help="Output directory"),
        click.option(
            "--format",
            "formats",
            multiple=True,
            type=click.Choice([f.value for f in OutputFormat]),
            help="Output formats (repeatable)",
        ),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def _load(source: DatasetSource, drop: bool) -> Dataset:
    dataset = load_dataset(source.path, name=source.name, schema_path=source.schema_path)
    logger.info(
        f"Loaded {dataset.name}: {len(dataset)} projects, "
        f"{dataset.incomplete_count} incomplete"
    )
    return drop_incomplete(dataset) if drop else dataset


def _read_query(query: str) -> Dict[str, Any]:
    """A query project from a JSON file, a one-row CSV file, or inline JSON."""
    path = Path(query)
    if path.suffix.lower() == ".csv":
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, comment="#")
        if frame.empty:
            raise DataError(f"query file {path} has no rows")
        return frame.iloc[0].to_dict()
    if path.suffix.lower() == ".json":
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    try:
        mapping = json.loads(query)
    except json.JSONDecodeError:
        raise click.UsageError(f"--query must be a .json/.csv file or a JSON object: {query}")
    if not isinstance(mapping, dict):
        raise click.UsageError("--query JSON must be an object")
    return mapping


@click.group(cls=FuzzyAnalogyGroup)
@click.option(
    "--log-level",
    type=click.Choice(LOG_LEVELS, case_sensitive=False),
    default=None,
    help="Defaults to FUZZY_ANALOGY_LOG_LEVEL or WARNING",
)
def cli(log_level):
    """Fuzzy-analogy software effort estimation."""
    load_dotenv()
    level = (log_level or os.getenv("FUZZY_ANALOGY_LOG_LEVEL") or "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format=LOG_FORMAT,
        stream=sys.stderr,
        force=True,
    )


@cli.command("summarize")
@run_options
def cmd_summarize(**options):
    """Print project counts and mean effort; write the summary JSON."""
    config = resolve_config(**options)
    echo = config.echo()
    with data_errors():
        for source in config.datasets:
            summary = summarize(_load(source, config.drop_incomplete))
            write_summary(summary, Path(config.output_dir), echo)
            console.print(
                f"{summary.name}: {summary.project_count} projects, "
                f"mean effort {summary.mean_actual_effort:.3f} {summary.effort_unit}"
            )
            if summary.incomplete_count:
                console.print(f"  {summary.incomplete_count} projects have missing values")
            if summary.reference_delta_percent is not None:
                console.print(
                    f"  published mean {summary.reference_mean_effort}, "
                    f"delta {summary.reference_delta_percent:+.2f}%"
                )


@cli.command("estimate")
@run_options
@click.option("--query", required=True, help="Query project: JSON/CSV file or inline JSON")
@click.option("--top", default=5, show_default=True, help="Analogs to list")
def cmd_estimate(query, top, **options):
    """Estimate the effort of one new project from a dataset."""
    config = resolve_config(**options)
    if len(config.datasets) != 1:
        raise click.UsageError("estimate takes exactly one --dataset")
    estimation = config.estimation
    with data_errors():
        mapping = _read_query(query)
        dataset = _load(config.datasets[0], drop=True)
        project = project_from_mapping(mapping, dataset)
        partitions = {}
        if estimation.mode in (EstimationMode.FUZZY_ANALOGY, EstimationMode.COCOMO_ADJUSTED):
            partitions = build_partitions(
                dataset, estimation.fuzzy, estimation.similarity.features
            )
        result = run_estimate(project, dataset, partitions, estimation)
        write_estimate(result, dataset.name, Path(config.output_dir), config.echo())

    console.print(f"Estimated effort: {result.value:.2f} {dataset.effort_unit}")
    if result.fallback_used:
        console.print("[yellow]No similar project found; used the dataset mean[/yellow]")
    table = Table(title="Top analogs")
    table.add_column("Project")
    table.add_column("Weight", justify="right")
    for contribution in result.top_contributions(top):
        table.add_row(contribution.project_id, f"{contribution.weight:.4f}")
    console.print(table)


@cli.command("evaluate")
@run_options
def cmd_evaluate(**options):
    """Leave-one-out MMRE per dataset, compared with the published results."""
    config = resolve_config(**options)
    echo = config.echo()
    out_dir = Path(config.output_dir)

    datasets = []
    with data_errors():
        for source in config.datasets:
            # leave-one-out needs complete cases
            datasets.append(_load(source, drop=True))

    reports = []
    failed = []
    for dataset in datasets:
        try:
            report = loo_evaluate(dataset, config.estimation, leaky=config.leaky_partitions)
        except FuzzyAnalogyError as e:
            err_console.print(f"[red]{escape(f'{dataset.name}: evaluation failed: {e}')}[/red]")
            failed.append(dataset.name)
            continue
        reports.append(report)
        with data_errors():
            write_report(report, out_dir, echo, config.formats)
        console.print(
            f"{report.dataset}: MMRE {report.mmre_percent:.2f}% "
            f"({len(report.records)} projects, {report.failure_count} failed, "
            f"{report.protocol})"
        )

    table = compare(reports, strict=False)
    with data_errors():
        write_comparison(table, out_dir, echo, config.formats)

    rich_table = Table(title="MMRE (%)")
    for column in ("Method", "Source", "Dataset", "MMRE", "Reference", "Delta"):
        rich_table.add_column(column)
    for row in table.rows:
        rich_table.add_row(
            row.method,
            row.source,
            row.dataset,
            f"{row.mmre_percent:.3f}",
            "n/a" if row.reference_mmre_percent is None else f"{row.reference_mmre_percent:.3f}",
            "n/a" if row.delta is None else f"{row.delta:+.3f}",
        )
    console.print(rich_table)

    if failed:
        raise EvaluationFailed(f"evaluation failed for {', '.join(failed)}")


@cli.command("similarity")
@run_options
def cmd_similarity(**options):
    """Write the pairwise similarity matrix and the partitions behind it."""
    config = resolve_config(**options)
    estimation = config.estimation
    with data_errors():
        for source in config.datasets:
            dataset = _load(source, drop=True)
            partitions = build_partitions(
                dataset, estimation.fuzzy, estimation.similarity.features
            )
            matrix = similarity_matrix(dataset, partitions, estimation.similarity)
            paths = write_similarity(
                matrix, partitions, dataset.name, Path(config.output_dir), config.echo()
            )
            console.print(f"{dataset.name}: {len(dataset)}x{len(dataset)} matrix -> {paths[0]}")


def main():
    cli()


if __name__ == "__main__":
    main()
