"""
Report files and charts.

Every file carries the format version and the effective run configuration,
and contains nothing run-dependent (no timestamps, fixed SVG ids), so
repeating a run reproduces its outputs byte for byte.
"""

import io
import json
import logging
import re
from pathlib import Path
from typing import Any, Dict, List, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import pandas as pd
from pydantic import BaseModel

from src.models.config import FORMAT_VERSION, OutputFormat
from src.models.dataset import DatasetSummary
from src.models.estimation import Estimate, SimilarityMatrix
from src.models.evaluation import ComparisonTable, EvaluationReport
from src.models.fuzzy import FuzzyPartition
from src.models.utils import partitions_to_jsonl, with_run_header
from src.references import DISPLAY_NAMES
from src.similarity import similarity_matrix_to_csv

logger = logging.getLogger(__name__)

plt.rcParams["svg.hashsalt"] = "fuzzy-analogy"
plt.rcParams["svg.fonttype"] = "none"

MISSING = "n/a"


def _config_line(config: Dict[str, Any]) -> str:
    return json.dumps(config, sort_keys=True, separators=(",", ":"))


def json_text(model: BaseModel, config: Dict[str, Any]) -> str:
    return json.dumps(with_run_header(model, config), indent=2) + "\n"


def csv_text(frame: pd.DataFrame, config: Dict[str, Any]) -> str:
    """CSV body preceded by `#` comment lines holding the run header."""
    header = f"# format_version: {FORMAT_VERSION}\n# config: {_config_line(config)}\n"
    return header + frame.to_csv(index=False, na_rep=MISSING, lineterminator="\n")


def file_stem(name: str) -> str:
    return re.sub(r"[^\w.-]+", "_", name).strip("_") or "dataset"


def write_text(path: Union[str, Path], text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    logger.info(f"Wrote {path}")
    return path


def write_summary(summary: DatasetSummary, out_dir: Path, config: Dict[str, Any]) -> Path:
    return write_text(
        Path(out_dir) / f"summary_{file_stem(summary.name)}.json", json_text(summary, config)
    )


def write_estimate(
    estimate: Estimate, dataset_name: str, out_dir: Path, config: Dict[str, Any]
) -> Path:
    return write_text(
        Path(out_dir) / f"estimate_{file_stem(dataset_name)}.json",
        json_text(estimate, config),
    )


def write_similarity(
    matrix: SimilarityMatrix,
    partitions: Dict[str, FuzzyPartition],
    dataset_name: str,
    out_dir: Path,
    config: Dict[str, Any],
) -> List[Path]:
    """Similarity matrix CSV plus the partitions it was computed with."""
    stem = file_stem(dataset_name)
    header = f"# format_version: {FORMAT_VERSION}\n# config: {_config_line(config)}\n"
    return [
        write_text(
            Path(out_dir) / f"similarity_{stem}.csv",
            header + similarity_matrix_to_csv(matrix),
        ),
        write_text(
            Path(out_dir) / f"partitions_{stem}.jsonl",
            partitions_to_jsonl(
                partitions, header={"format_version": FORMAT_VERSION, "config": config}
            ),
        ),
    ]


def write_report(
    report: EvaluationReport,
    out_dir: Path,
    config: Dict[str, Any],
    formats: List[OutputFormat],
) -> List[Path]:
    stem = f"report_{file_stem(report.dataset)}"
    written = []
    if OutputFormat.JSON in formats:
        written.append(write_text(Path(out_dir) / f"{stem}.json", json_text(report, config)))
    if OutputFormat.CSV in formats:
        written.append(
            write_text(Path(out_dir) / f"{stem}.csv", csv_text(report.records_dataframe(), config))
        )
    if OutputFormat.SVG in formats:
        chart = dataset_chart(report, config)
        written.append(
            write_text(Path(out_dir) / f"estimates_{file_stem(report.dataset)}.svg", chart)
        )
    return written


def write_comparison(
    table: ComparisonTable,
    out_dir: Path,
    config: Dict[str, Any],
    formats: List[OutputFormat],
) -> List[Path]:
    out_dir = Path(out_dir)
    written = []
    if OutputFormat.JSON in formats:
        written.append(write_text(out_dir / "comparison.json", json_text(table, config)))
    if OutputFormat.CSV in formats:
        written.append(
            write_text(out_dir / "comparison.csv", csv_text(table.to_dataframe(), config))
        )
        written.append(
            write_text(
                out_dir / "comparison_efforts.csv",
                csv_text(table.efforts_dataframe(), config),
            )
        )
    if OutputFormat.SVG in formats:
        written.append(write_text(out_dir / "mmre_comparison.svg", mmre_chart(table, config)))
        if table.efforts:
            written.append(
                write_text(out_dir / "average_effort.svg", effort_chart(table, config))
            )
    return written


def _display(dataset: str) -> str:
    return DISPLAY_NAMES.get(dataset, dataset)


def _svg(fig, config: Dict[str, Any]) -> str:
    buffer = io.StringIO()
    fig.savefig(
        buffer,
        format="svg",
        metadata={
            "Date": None,
            "Description": _config_line({"format_version": FORMAT_VERSION, "config": config}),
        },
    )
    plt.close(fig)
    return buffer.getvalue()


def _grouped_bars(ax, frame: pd.DataFrame):
    """Bars per row of `frame`, one colour per column."""
    width = 0.8 / max(len(frame.columns), 1)
    positions = range(len(frame.index))
    for offset, column in enumerate(frame.columns):
        ax.bar(
            [x + (offset - (len(frame.columns) - 1) / 2) * width for x in positions],
            frame[column].fillna(0.0),
            width,
            label=str(column),
        )
    ax.set_xticks(list(positions))
    ax.set_xticklabels([_display(name) for name in frame.index])
    ax.legend()


def mmre_chart(table: ComparisonTable, config: Dict[str, Any]) -> str:
    """Grouped bars of MMRE per dataset, one bar per method."""
    frame = table.to_dataframe()
    pivot = frame.pivot_table(
        index="dataset", columns="method", values="mmre_percent", aggfunc="first", sort=False
    )
    fig, ax = plt.subplots(figsize=(8, 5))
    _grouped_bars(ax, pivot)
    ax.set_ylabel("MMRE (%)")
    ax.set_title("Comparison of MMRE")
    fig.tight_layout()
    return _svg(fig, config)


def effort_chart(table: ComparisonTable, config: Dict[str, Any]) -> str:
    """Average actual vs estimated effort per evaluated dataset."""
    frame = table.efforts_dataframe().drop_duplicates("dataset").set_index("dataset")
    bars = pd.DataFrame(
        {
            "Actual": frame["actual_avg_effort"],
            "Estimated": frame["estimated_avg_effort"],
            "Published actual": frame["reference_actual_avg_effort"],
            "Published estimated": frame["reference_estimated_avg_effort"],
        },
        index=frame.index,
    ).dropna(axis=1, how="all")
    fig, ax = plt.subplots(figsize=(8, 5))
    _grouped_bars(ax, bars)
    ax.set_ylabel("Average effort")
    ax.set_title("Actual vs estimated average effort")
    fig.tight_layout()
    return _svg(fig, config)


def dataset_chart(report: EvaluationReport, config: Dict[str, Any]) -> str:
    """Actual and estimated effort of every held-out project."""
    records = report.records_dataframe()
    positions = range(1, len(records) + 1)
    fig, ax = plt.subplots(figsize=(10, 5))
    ax.plot(positions, records["actual"], marker="o", label="Actual effort")
    ax.plot(positions, records["estimated"], marker="s", label="Estimated effort")
    ax.set_xlabel("Project")
    ax.set_ylabel(f"Effort ({report.effort_unit})")
    ax.set_title(f"{_display(report.dataset)}: actual vs estimated effort")
    ax.legend()
    fig.tight_layout()
    return _svg(fig, config)
