#!/usr/bin/env python3
"""
Historical Dataset Ingestion

Parses PROMISE-style ARFF files and headered CSV files with a JSON schema
sidecar into validated Dataset models, removes incomplete projects and
summarizes effort statistics.
"""

import io
import json
import logging
import math
import re
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import pandas as pd
from pydantic import ValidationError

from src.errors import (
    DatasetError,
    DatasetParseError,
    EmptyDatasetError,
    NoUsableCasesError,
    SchemaError,
)
from src.models.dataset import (
    AttributeKind,
    AttributeRange,
    AttributeSchema,
    Dataset,
    DatasetProfile,
    DatasetSchemaFile,
    DatasetSummary,
    Project,
)
from src.references import REFERENCE_RESULTS

logger = logging.getLogger(__name__)

MISSING_TOKENS = {"?", ""}
NUMERIC_TYPES = {"numeric", "real", "integer"}

# COCOMO rating scale, lowest first
RATING_TERMS = ["vl", "l", "n", "h", "vh", "xh"]

RATING_ALIASES = {
    "vl": "vl",
    "verylow": "vl",
    "vlow": "vl",
    "l": "l",
    "low": "l",
    "n": "n",
    "nom": "n",
    "nominal": "n",
    "h": "h",
    "high": "h",
    "vh": "vh",
    "veryhigh": "vh",
    "vhigh": "vh",
    "xh": "xh",
    "eh": "xh",
    "xhigh": "xh",
    "extrahigh": "xh",
    "exhigh": "xh",
}

PROFILES = [
    DatasetProfile(
        name="nasa60",
        aliases=["nasa60", "cocomonasa", "cocomonasa_v1", "coc_nasa", "cocomo_nasa"],
        effort_column="act_effort",
        size_column="loc",
        units={"loc": "KLOC"},
    ),
    DatasetProfile(
        name="nasa93",
        aliases=["nasa93", "nasa93_dem", "cocomonasa_v2"],
        effort_column="act_effort",
        id_column="recordnumber",
        size_column="equivphyskloc",
        units={"equivphyskloc": "KLOC", "year": "year"},
    ),
    DatasetProfile(
        name="desharnais",
        aliases=["desharnais", "desharnais_1_1"],
        effort_column="Effort",
        id_column="Project",
        effort_unit="person-hours",
        categorical={"Language": ["1", "2", "3"]},
        units={
            "TeamExp": "years",
            "ManagerExp": "years",
            "YearEnd": "year",
            "Length": "months",
            "PointsNonAdjust": "function points",
            "PointsAjust": "function points",
        },
    ),
]


def _alias_key(name: str) -> str:
    return re.sub(r"[^a-z0-9]", "", name.lower())


def resolve_profile(*candidates: Optional[str]) -> DatasetProfile:
    """
    Find the ingestion profile for the first candidate name that matches one.

    Candidates are tried in order (explicit name, @relation, file stem).
    Unknown names get a generic profile named after the first candidate.
    """
    names = [candidate for candidate in candidates if candidate]
    for name in names:
        key = _alias_key(name)
        for profile in PROFILES:
            if key in {_alias_key(alias) for alias in profile.aliases}:
                return profile
    return DatasetProfile(name=names[0] if names else "dataset")


def canonical_rating(label: str) -> Optional[str]:
    """Map a COCOMO rating label (any case or spelling) onto vl..xh."""
    return RATING_ALIASES.get(re.sub(r"[\s_\-]", "", label.lower()))


def is_rating_scale(labels: List[str]) -> bool:
    return bool(labels) and all(canonical_rating(label) for label in labels)


def normalize_term(token: str) -> str:
    """Numeric-looking category tokens compare by value ('1.0' == '1')."""
    try:
        number = float(token)
    except ValueError:
        return token
    if number.is_integer():
        return str(int(number))
    return repr(number)


def _find_column(declared: List[str], wanted: Optional[str]) -> Optional[str]:
    if wanted is None:
        return None
    for name in declared:
        if name.lower() == wanted.lower():
            return name
    return None


def _split_row(line: str) -> List[str]:
    """Split one ARFF line on commas, honouring quotes and trailing % comments."""
    tokens: List[str] = []
    buffer: List[str] = []
    quote = None
    for char in line:
        if quote:
            if char == quote:
                quote = None
            else:
                buffer.append(char)
            continue
        if char in "'\"":
            quote = char
        elif char == "%":
            break
        elif char == ",":
            tokens.append("".join(buffer).strip())
            buffer = []
        else:
            buffer.append(char)
    if quote:
        raise ValueError("unterminated quote")
    tokens.append("".join(buffer).strip())
    return tokens


def _unquote(token: str) -> str:
    token = token.strip()
    if len(token) >= 2 and token[0] == token[-1] and token[0] in "'\"":
        return token[1:-1]
    return token


def _coerce_value(
    token: str, attribute: AttributeSchema, raw_labels: Optional[List[str]]
) -> Union[float, str, None]:
    """
    Convert one raw token to the attribute's kind.

    Raises:
        ValueError: with a message naming the offending token.
    """
    if token in MISSING_TOKENS:
        return None
    if not attribute.is_categorical:
        try:
            return float(token)
        except ValueError:
            raise ValueError(f"{token!r} is not a number for {attribute.name!r}")

    if attribute.terms == RATING_TERMS:
        label = canonical_rating(token)
    elif raw_labels is not None:
        label = token if token in raw_labels else None
    else:
        label = token if token in attribute.terms else normalize_term(token)
    if label is None or label not in attribute.terms:
        raise ValueError(f"unknown label {token!r} for {attribute.name!r}")
    return label


def _parse_effort(token: str, line: int) -> float:
    try:
        effort = float(token)
    except ValueError:
        raise DatasetParseError(f"effort {token!r} is not a number", line)
    if not effort > 0:
        raise DatasetParseError(f"effort must be positive, got {token!r}", line)
    return effort


def _build_dataset(**kwargs) -> Dataset:
    try:
        return Dataset(**kwargs)
    except ValidationError as e:
        raise SchemaError(str(e)) from e


def parse_arff(
    text: str,
    name: Optional[str] = None,
    profile: Optional[DatasetProfile] = None,
    effort_column: Optional[str] = None,
) -> Dataset:
    """
    Parse an ARFF document into a Dataset.

    Supports @relation, numeric (numeric/real/integer) and nominal attributes,
    '?' for missing values and '%' comments. Nominal attributes whose labels all
    read as COCOMO ratings are canonicalized to the vl..xh scale.

    Args:
        text: Full ARFF content
        name: Dataset name; @relation is used when omitted
        profile: Ingestion profile; resolved from the name when omitted
        effort_column: Overrides the profile's effort column

    Returns:
        A validated Dataset with one project per data row

    Raises:
        DatasetParseError: malformed header, row arity mismatch, unknown
            nominal label, non-numeric or non-positive effort
    """
    relation = None
    declared: List[Tuple[str, Optional[List[str]], int]] = []
    rows: List[Tuple[int, List[str]]] = []
    in_data = False

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if in_data:
            if line.startswith("{"):
                raise DatasetParseError("sparse ARFF rows are not supported", line_no)
            try:
                rows.append((line_no, _split_row(line)))
            except ValueError as e:
                raise DatasetParseError(str(e), line_no)
            continue

        lower = line.lower()
        if lower.startswith("@relation"):
            relation = _unquote(line[len("@relation") :])
        elif lower.startswith("@attribute"):
            match = re.match(
                r"@attribute\s+('[^']*'|\"[^\"]*\"|\S+)\s+(.+)$", line, re.IGNORECASE
            )
            if not match:
                raise DatasetParseError("malformed @attribute declaration", line_no)
            attr_name = _unquote(match.group(1))
            type_spec = match.group(2).strip()
            if type_spec.startswith("{"):
                if not type_spec.endswith("}"):
                    raise DatasetParseError("unterminated nominal list", line_no)
                labels = [
                    label for label in _split_row(type_spec[1:-1]) if label != ""
                ]
                if not labels:
                    raise DatasetParseError(f"{attr_name!r} has no labels", line_no)
                declared.append((attr_name, labels, line_no))
            elif type_spec.lower() in NUMERIC_TYPES:
                declared.append((attr_name, None, line_no))
            else:
                raise DatasetParseError(
                    f"unsupported attribute type {type_spec!r}", line_no
                )
        elif lower.startswith("@data"):
            if not declared:
                raise DatasetParseError("@data before any @attribute", line_no)
            in_data = True
        else:
            raise DatasetParseError(f"unexpected header line {line!r}", line_no)

    if relation is None:
        raise DatasetParseError("missing @relation")
    if not in_data:
        raise DatasetParseError("missing @data section")

    profile = profile or resolve_profile(name, relation)
    declared_names = [attr_name for attr_name, _, _ in declared]
    if len(set(declared_names)) != len(declared_names):
        raise DatasetParseError("duplicate attribute names")

    effort_name = _find_column(declared_names, effort_column or profile.effort_column)
    if effort_name is None:
        raise DatasetParseError(
            f"effort column {effort_column or profile.effort_column!r} is not declared"
        )
    id_name = _find_column(declared_names, profile.id_column)
    size_name = _find_column(declared_names, profile.size_column)
    overrides = {key.lower(): terms for key, terms in profile.categorical.items()}
    units = {key.lower(): unit for key, unit in profile.units.items()}

    attributes: Dict[str, AttributeSchema] = {}
    raw_labels: Dict[str, Optional[List[str]]] = {}
    for attr_name, labels, line_no in declared:
        if attr_name in (effort_name, id_name):
            continue
        try:
            if labels is None and attr_name.lower() in overrides:
                attribute = AttributeSchema(
                    name=attr_name,
                    kind=AttributeKind.CATEGORICAL,
                    terms=overrides[attr_name.lower()],
                )
                raw_labels[attr_name] = None
            elif labels is None:
                attribute = AttributeSchema(
                    name=attr_name,
                    kind=AttributeKind.NUMERIC,
                    unit=units.get(attr_name.lower()),
                )
                raw_labels[attr_name] = None
            elif is_rating_scale(labels):
                attribute = AttributeSchema(
                    name=attr_name, kind=AttributeKind.CATEGORICAL, terms=RATING_TERMS
                )
                raw_labels[attr_name] = None
            else:
                attribute = AttributeSchema(
                    name=attr_name, kind=AttributeKind.CATEGORICAL, terms=labels
                )
                raw_labels[attr_name] = labels
        except ValidationError as e:
            raise DatasetParseError(str(e), line_no) from e
        attributes[attr_name] = attribute

    projects = []
    for row_index, (line_no, tokens) in enumerate(rows, start=1):
        if len(tokens) != len(declared):
            raise DatasetParseError(
                f"expected {len(declared)} values, found {len(tokens)}", line_no
            )
        row = dict(zip(declared_names, tokens))
        if id_name is not None:
            project_id = row[id_name]
            if project_id in MISSING_TOKENS:
                raise DatasetParseError("missing project id", line_no)
        else:
            project_id = str(row_index)

        values = {}
        for attr_name, attribute in attributes.items():
            try:
                values[attr_name] = _coerce_value(
                    row[attr_name], attribute, raw_labels[attr_name]
                )
            except ValueError as e:
                raise DatasetParseError(str(e), line_no)
        effort = _parse_effort(row[effort_name], line_no)
        projects.append(Project(id=project_id, values=values, actual_effort=effort))

    ids = [project.id for project in projects]
    if len(set(ids)) != len(ids):
        raise DatasetParseError("duplicate project ids")

    dataset = _build_dataset(
        name=profile.name if name is None else name,
        attributes=list(attributes.values()),
        projects=projects,
        effort_unit=profile.effort_unit,
        effort_column=effort_name,
        id_column=id_name or "id",
        size_column=size_name,
    )
    logger.info(
        f"Parsed {dataset.name}: {len(dataset)} projects, "
        f"{dataset.incomplete_count} incomplete"
    )
    return dataset


def _strip_comment_lines(text: str) -> Tuple[str, int]:
    lines = text.splitlines()
    skipped = 0
    while skipped < len(lines) and lines[skipped].startswith("#"):
        skipped += 1
    return "\n".join(lines[skipped:]), skipped


def parse_csv(
    text: str, schema: Union[DatasetSchemaFile, Mapping[str, Any], str]
) -> Dataset:
    """
    Parse a headered CSV dataset described by a JSON schema sidecar.

    Empty cells and '?' are missing values; leading '#' lines are skipped.
    """
    if isinstance(schema, str):
        schema = json.loads(schema)
    if not isinstance(schema, DatasetSchemaFile):
        try:
            schema = DatasetSchemaFile.model_validate(schema)
        except ValidationError as e:
            raise SchemaError(f"invalid schema sidecar: {e}") from e

    body, skipped = _strip_comment_lines(text)
    try:
        frame = pd.read_csv(io.StringIO(body), dtype=str, keep_default_na=False)
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DatasetParseError(f"unreadable CSV: {e}") from e

    needed = [schema.id_column, schema.effort_column] + [
        attribute.name for attribute in schema.attributes
    ]
    absent = [column for column in needed if column not in frame.columns]
    if absent:
        raise DatasetParseError(f"CSV is missing columns {absent}", skipped + 1)
    extra = [column for column in frame.columns if column not in needed]
    if extra:
        logger.warning(f"Ignoring CSV columns not in the schema: {extra}")

    projects = []
    for offset, row in enumerate(frame.to_dict(orient="records")):
        # header sits on line skipped + 1
        line_no = skipped + 2 + offset
        values = {}
        for attribute in schema.attributes:
            try:
                values[attribute.name] = _coerce_value(
                    row[attribute.name].strip(), attribute, None
                )
            except ValueError as e:
                raise DatasetParseError(str(e), line_no)
        effort = _parse_effort(row[schema.effort_column].strip(), line_no)
        projects.append(
            Project(id=row[schema.id_column], values=values, actual_effort=effort)
        )

    return _build_dataset(
        name=schema.name,
        attributes=schema.attributes,
        projects=projects,
        effort_unit=schema.effort_unit,
        effort_column=schema.effort_column,
        id_column=schema.id_column,
        size_column=schema.size_column,
        dropped_incomplete=schema.dropped_incomplete,
    )


def _format_value(value: Union[float, str, None]) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return value


def dataset_to_csv(dataset: Dataset) -> Tuple[str, str]:
    """
    Canonical CSV dump of a dataset and its JSON schema sidecar.

    Returns:
        (csv text, sidecar JSON text); parse_csv of the pair rebuilds the dataset.
    """
    columns = [dataset.id_column] + dataset.attribute_names + [dataset.effort_column]
    if len(set(columns)) != len(columns):
        raise SchemaError(f"column names collide in {columns}")

    rows = [
        [project.id]
        + [_format_value(project.values[name]) for name in dataset.attribute_names]
        + [repr(project.actual_effort)]
        for project in dataset.projects
    ]
    frame = pd.DataFrame(rows, columns=columns)
    csv_text = frame.to_csv(index=False, lineterminator="\n")

    sidecar = DatasetSchemaFile(
        name=dataset.name,
        attributes=dataset.attributes,
        effort_column=dataset.effort_column,
        id_column=dataset.id_column,
        size_column=dataset.size_column,
        effort_unit=dataset.effort_unit,
        dropped_incomplete=dataset.dropped_incomplete,
    )
    return csv_text, sidecar.model_dump_json(indent=2)


def load_dataset(
    path: Union[str, Path],
    name: Optional[str] = None,
    schema_path: Optional[Union[str, Path]] = None,
) -> Dataset:
    """
    Load a dataset file, dispatching on its suffix.

    CSV files need a schema sidecar: `schema_path`, or `<stem>.schema.json`
    next to the file.
    """
    path = Path(path)
    if not path.exists():
        raise DatasetError(f"dataset file not found: {path}")

    suffix = path.suffix.lower()
    if suffix == ".arff":
        text = path.read_text(encoding="utf-8", errors="replace")
        profile = None
        if name is None:
            # the file stem is a weaker hint than @relation
            relation = re.search(r"^\s*@relation\s+(.+)$", text, re.I | re.M)
            relation_name = _unquote(relation.group(1)) if relation else None
            profile = resolve_profile(relation_name, path.stem)
        return parse_arff(text, name=name, profile=profile)

    if suffix == ".csv":
        schema_file = Path(schema_path) if schema_path else path.with_suffix(".schema.json")
        if not schema_file.exists():
            raise DatasetError(f"CSV input needs a schema sidecar: {schema_file}")
        dataset = parse_csv(
            path.read_text(encoding="utf-8"), schema_file.read_text(encoding="utf-8")
        )
        if name is not None:
            dataset = dataset.model_copy(update={"name": name})
        return dataset

    raise DatasetError(f"unsupported dataset format {suffix!r}: {path}")


def project_from_mapping(
    mapping: Mapping[str, Any], dataset: Dataset, project_id: str = "query"
) -> Project:
    """
    Build a query project from a JSON object or CSV row against a dataset schema.

    Keys match attribute names exactly or case-insensitively. Absent keys are
    missing values; similarity raises if a selected feature is missing.
    """
    lowered = {str(key).lower(): value for key, value in mapping.items()}
    known = {name.lower() for name in dataset.attribute_names} | {
        dataset.effort_column.lower(),
        dataset.id_column.lower(),
    }
    unknown = [key for key in mapping if str(key).lower() not in known]
    if unknown:
        logger.warning(f"Ignoring query fields not in the schema: {unknown}")

    values = {}
    for attribute in dataset.attributes:
        raw = mapping.get(attribute.name, lowered.get(attribute.name.lower()))
        token = "" if raw is None else str(raw).strip()
        try:
            values[attribute.name] = _coerce_value(token, attribute, None)
        except ValueError as e:
            raise SchemaError(f"query: {e}") from e

    effort = lowered.get(dataset.effort_column.lower())
    actual = None
    if effort not in (None, "", "?"):
        try:
            actual = float(effort)
        except (TypeError, ValueError):
            raise SchemaError(f"query effort {effort!r} is not a number")
    try:
        return Project(id=project_id, values=values, actual_effort=actual)
    except ValidationError as e:
        raise SchemaError(str(e)) from e


def drop_incomplete(dataset: Dataset) -> Dataset:
    """
    Keep only projects without missing values, in their original order.

    Raises:
        NoUsableCasesError: when every project has a missing value
    """
    complete = [project for project in dataset.projects if project.is_complete()]
    if not complete:
        raise NoUsableCasesError(f"{dataset.name}: no usable cases")
    dropped = len(dataset) - len(complete)
    if dropped:
        logger.info(f"Dropped {dropped} incomplete projects from {dataset.name}")
    return dataset.model_copy(
        update={
            "projects": complete,
            "dropped_incomplete": dataset.dropped_incomplete + dropped,
        }
    )


def summarize(dataset: Dataset) -> DatasetSummary:
    """
    Count and effort statistics, per-attribute ranges, and the gap to the
    published average effort when the dataset is one of the known three.
    """
    if not dataset.projects:
        raise EmptyDatasetError(f"{dataset.name}: dataset is empty")

    efforts = dataset.efforts
    mean = math.fsum(efforts) / len(efforts)

    ranges = {}
    for attribute in dataset.attributes:
        column = [project.values[attribute.name] for project in dataset.projects]
        present = [value for value in column if value is not None]
        missing = len(column) - len(present)
        if attribute.is_categorical:
            ranges[attribute.name] = AttributeRange(
                kind=attribute.kind,
                term_counts={term: present.count(term) for term in attribute.terms},
                missing=missing,
            )
        else:
            ranges[attribute.name] = AttributeRange(
                kind=attribute.kind,
                min=min(present) if present else None,
                max=max(present) if present else None,
                missing=missing,
            )

    reference = REFERENCE_RESULTS.actual_avg_effort.get(dataset.name)
    delta = None
    if reference is not None:
        delta = 100.0 * (mean - reference) / reference
        if abs(delta) > 0.5:
            logger.warning(
                f"{dataset.name}: mean effort {mean:.3f} differs from the published "
                f"{reference} by {delta:.2f}%"
            )

    return DatasetSummary(
        name=dataset.name,
        project_count=len(dataset),
        mean_actual_effort=mean,
        min_actual_effort=min(efforts),
        max_actual_effort=max(efforts),
        effort_unit=dataset.effort_unit,
        incomplete_count=dataset.incomplete_count,
        dropped_incomplete=dataset.dropped_incomplete,
        attribute_ranges=ranges,
        reference_mean_effort=reference,
        reference_delta_percent=delta,
    )
