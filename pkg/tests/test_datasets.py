#!/usr/bin/env python3
"""
Tests for dataset ingestion: ARFF and CSV parsing, cleaning and summaries.
"""

import os
import sys
from pathlib import Path

import pytest
from pydantic import ValidationError

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.datasets import (
    RATING_TERMS,
    dataset_to_csv,
    drop_incomplete,
    load_dataset,
    parse_arff,
    parse_csv,
    project_from_mapping,
    resolve_profile,
    summarize,
)
from src.errors import (
    DatasetError,
    DatasetParseError,
    EmptyDatasetError,
    NoUsableCasesError,
    SchemaError,
)
from src.models.dataset import AttributeKind, AttributeSchema

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def cocomo_text():
    return (FIXTURES / "toy_cocomo.arff").read_text(encoding="utf-8")


@pytest.fixture
def cocomo(cocomo_text):
    return parse_arff(cocomo_text)


@pytest.fixture
def desharnais():
    return load_dataset(FIXTURES / "toy_desharnais.arff")


def test_parse_arff_counts_and_schema(cocomo):
    assert cocomo.name == "toy_cocomo"
    assert len(cocomo) == 6
    assert cocomo.attribute_names == ["rely", "cplx", "loc"]
    assert cocomo.effort_column == "act_effort"
    assert [project.id for project in cocomo.projects] == ["1", "2", "3", "4", "5", "6"]
    assert cocomo.efforts == [117.6, 117.6, 31.2, 36.0, 25.2, 8.4]


def test_ratings_are_canonicalized(cocomo):
    rely = cocomo.attribute("rely")
    assert rely.kind == AttributeKind.CATEGORICAL
    assert rely.terms == RATING_TERMS
    assert cocomo.projects[0].values == {"rely": "n", "cplx": "h", "loc": 25.9}
    assert cocomo.projects[4].values["cplx"] == "vh"
    assert cocomo.projects[5].values["rely"] == "vh"


def test_parse_arff_explicit_name(cocomo_text):
    assert parse_arff(cocomo_text, name="mine").name == "mine"


def test_parse_arff_reports_line_of_bad_row():
    text = (FIXTURES / "bad_arity.arff").read_text(encoding="utf-8")
    with pytest.raises(DatasetParseError) as exc_info:
        parse_arff(text)
    assert exc_info.value.line == 8
    assert "line 8" in str(exc_info.value)


def test_parse_arff_rejects_unknown_label(cocomo_text):
    text = cocomo_text.replace("Very_High,High,2.2,8.4", "Huge,High,2.2,8.4")
    with pytest.raises(DatasetParseError, match="Huge"):
        parse_arff(text)


@pytest.mark.parametrize("effort", ["0", "-3", "abc"])
def test_parse_arff_rejects_bad_effort(cocomo_text, effort):
    text = cocomo_text.replace("Very_High,High,2.2,8.4", f"Very_High,High,2.2,{effort}")
    with pytest.raises(DatasetParseError):
        parse_arff(text)


def test_parse_arff_rejects_string_attributes():
    text = "@relation r\n@attribute note string\n@attribute act_effort numeric\n@data\n"
    with pytest.raises(DatasetParseError, match="unsupported attribute type"):
        parse_arff(text)


def test_parse_arff_requires_effort_column():
    text = "@relation r\n@attribute size numeric\n@data\n1\n"
    with pytest.raises(DatasetParseError, match="effort column"):
        parse_arff(text)


def test_quoted_values_and_comments():
    text = (
        "@relation r\n"
        "@attribute lang {'C ++',Java}\n"
        "@attribute act_effort numeric\n"
        "@data\n"
        "'C ++',10 % first row\n"
        "Java,20\n"
    )
    dataset = parse_arff(text)
    assert [project.values["lang"] for project in dataset.projects] == ["C ++", "Java"]


def test_profile_roles_for_desharnais(desharnais):
    assert desharnais.name == "desharnais"
    assert desharnais.id_column == "Project"
    assert desharnais.effort_column == "Effort"
    assert desharnais.effort_unit == "person-hours"
    assert "Project" not in desharnais.attribute_names
    language = desharnais.attribute("Language")
    assert language.is_categorical
    assert language.terms == ["1", "2", "3"]
    assert desharnais.projects[5].values["Language"] == "2"


def test_numeric_unit_tags(desharnais, cocomo, cocomo_text):
    assert desharnais.attribute("Length").unit == "months"
    assert desharnais.attribute("TeamExp").unit == "years"
    assert desharnais.attribute("Language").unit is None
    assert cocomo.attribute("loc").unit is None
    assert parse_arff(cocomo_text, name="nasa60").attribute("loc").unit == "KLOC"
    with pytest.raises(ValidationError):
        AttributeSchema(name="rely", kind=AttributeKind.CATEGORICAL, terms=["l", "h"], unit="x")


def test_missing_values_and_drop_incomplete(desharnais):
    assert len(desharnais) == 6
    assert desharnais.incomplete_count == 1
    assert desharnais.projects[5].missing_features() == ["TeamExp", "ManagerExp"]

    complete = drop_incomplete(desharnais)
    assert len(complete) == 5
    assert complete.dropped_incomplete == 1
    assert [project.id for project in complete.projects] == ["1", "2", "3", "4", "5"]


def test_drop_incomplete_is_idempotent(desharnais, cocomo):
    once = drop_incomplete(desharnais)
    assert drop_incomplete(once) == once
    assert drop_incomplete(once).dropped_incomplete == 1
    assert drop_incomplete(cocomo) == cocomo


def test_drop_incomplete_with_nothing_left():
    text = "@relation r\n@attribute size numeric\n@attribute act_effort numeric\n@data\n?,10\n"
    with pytest.raises(NoUsableCasesError):
        drop_incomplete(parse_arff(text))


def test_summarize(cocomo):
    summary = summarize(cocomo)
    assert summary.project_count == 6
    assert summary.mean_actual_effort == pytest.approx(56.0, rel=1e-12)
    assert summary.min_actual_effort == 8.4
    assert summary.max_actual_effort == 117.6
    assert summary.attribute_ranges["loc"].min == 2.2
    assert summary.attribute_ranges["loc"].max == 25.9
    assert summary.attribute_ranges["rely"].term_counts["n"] == 2
    assert summary.reference_mean_effort is None


def test_summarize_records_published_delta(desharnais):
    summary = summarize(drop_incomplete(desharnais))
    assert summary.project_count == 5
    assert summary.mean_actual_effort == pytest.approx(3514.0, rel=1e-12)
    assert summary.reference_mean_effort == 5046.308
    expected = 100.0 * (3514.0 - 5046.308) / 5046.308
    assert summary.reference_delta_percent == pytest.approx(expected)


def test_summarize_empty_dataset():
    text = "@relation r\n@attribute size numeric\n@attribute act_effort numeric\n@data\n"
    with pytest.raises(EmptyDatasetError):
        summarize(parse_arff(text))


def test_resolve_profile_aliases():
    assert resolve_profile("CoCoMoNASA").name == "nasa60"
    assert resolve_profile(None, "nasa93_dem").name == "nasa93"
    assert resolve_profile("Desharnais-1.1").name == "desharnais"
    generic = resolve_profile("my_projects")
    assert generic.name == "my_projects"
    assert generic.effort_column == "act_effort"
    assert generic.id_column is None


def test_load_csv_with_sidecar():
    dataset = load_dataset(FIXTURES / "toy.csv")
    assert dataset.name == "toy"
    assert [project.id for project in dataset.projects] == ["a", "b"]
    assert [project.values["size"] for project in dataset.projects] == [0.0, 100.0]
    assert dataset.efforts == [100.0, 300.0]


def test_load_missing_file_names_path(tmp_path):
    missing = tmp_path / "nowhere.arff"
    with pytest.raises(DatasetError, match="nowhere.arff"):
        load_dataset(missing)


def test_csv_export_rebuilds_dataset(desharnais):
    csv_text, sidecar = dataset_to_csv(desharnais)
    assert csv_text.splitlines()[0] == "Project,TeamExp,ManagerExp,Length,Language,Effort"
    assert parse_csv(csv_text, sidecar) == desharnais


def test_csv_export_keeps_canonical_ratings(cocomo):
    csv_text, sidecar = dataset_to_csv(cocomo)
    assert csv_text.splitlines()[1] == "1,n,h,25.9,117.6"
    rebuilt = parse_csv(csv_text, sidecar)
    assert rebuilt == cocomo
    assert rebuilt.attribute("rely").terms == RATING_TERMS


def test_parse_csv_skips_header_comments_and_reports_lines():
    schema = (FIXTURES / "toy.schema.json").read_text(encoding="utf-8")
    text = "# format_version: 1\nid,size,effort\na,0,100\nb,big,300\n"
    with pytest.raises(DatasetParseError) as exc_info:
        parse_csv(text, schema)
    assert exc_info.value.line == 4


def test_project_from_mapping(cocomo):
    project = project_from_mapping({"RELY": "High", "cplx": "nominal", "loc": "10"}, cocomo)
    assert project.id == "query"
    assert project.values == {"rely": "h", "cplx": "n", "loc": 10.0}
    assert project.actual_effort is None

    partial = project_from_mapping({"loc": 3, "act_effort": 12}, cocomo, project_id="q2")
    assert partial.missing_features() == ["rely", "cplx"]
    assert partial.actual_effort == 12.0


def test_project_from_mapping_rejects_bad_values(cocomo):
    with pytest.raises(SchemaError):
        project_from_mapping({"rely": "enormous"}, cocomo)
    with pytest.raises(SchemaError):
        project_from_mapping({"loc": "ten"}, cocomo)
