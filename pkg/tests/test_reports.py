#!/usr/bin/env python3
"""
Tests for report files and charts.
"""

import json
import os
import sys
from pathlib import Path

import pandas as pd

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.datasets import load_dataset
from src.evaluation import compare, loo_evaluate
from src.models.estimation import EstimationConfig, EstimationMode
from src.reports import csv_text, dataset_chart, file_stem, json_text, mmre_chart

FIXTURES = Path(__file__).parent / "fixtures"
CONFIG = {"output_dir": "out", "estimation": {"mode": "dataset_mean"}}


def _report():
    dataset = load_dataset(FIXTURES / "toy.csv")
    return loo_evaluate(dataset, EstimationConfig(mode=EstimationMode.DATASET_MEAN))


def test_json_text_carries_run_header():
    document = json.loads(json_text(_report(), CONFIG))
    assert list(document)[:2] == ["format_version", "config"]
    assert document["config"] == CONFIG
    assert document["protocol"] == "leave-one-out"


def test_csv_text_header_and_missing_values():
    frame = pd.DataFrame([{"a": 1.5, "b": None}])
    lines = csv_text(frame, CONFIG).splitlines()
    assert lines[0] == "# format_version: 1"
    assert json.loads(lines[1][len("# config: "):]) == CONFIG
    assert lines[2:] == ["a,b", "1.5,n/a"]


def test_charts_are_deterministic():
    report = _report()
    table = compare([report], strict=False)
    assert mmre_chart(table, CONFIG) == mmre_chart(table, CONFIG)
    chart = dataset_chart(report, CONFIG)
    assert chart == dataset_chart(report, CONFIG)
    assert "<dc:date>" not in chart
    assert "dataset_mean" in chart


def test_file_stem():
    assert file_stem("nasa93") == "nasa93"
    assert file_stem("my data/set") == "my_data_set"
