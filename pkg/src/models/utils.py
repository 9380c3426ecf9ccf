import json
from typing import Any, Dict, Mapping, Optional

from pydantic import BaseModel

from src.models.config import FORMAT_VERSION
from src.models.fuzzy import FuzzyPartition


def partitions_to_jsonl(
    partitions: Mapping[str, FuzzyPartition], header: Optional[Dict[str, Any]] = None
) -> str:
    """
    Serialize fuzzy partitions to JSON Lines, one partition per line.

    Lines follow the mapping's order, so a run's partitions can be stored next
    to its report and reloaded to reproduce it.

    Args:
        partitions: Attribute name -> FuzzyPartition.
        header: Optional first line, e.g. the run header.

    Returns:
        A JSONL-formatted string.
    """
    lines = [json.dumps(header, sort_keys=True)] if header is not None else []
    lines += [partition.model_dump_json() for partition in partitions.values()]
    return "\n".join(lines) + "\n"


def partitions_from_jsonl(jsonl_str: str) -> Dict[str, FuzzyPartition]:
    """
    Deserialize partitions written by `partitions_to_jsonl`.

    A header line (any object without an "attribute" key) is skipped.

    Args:
        jsonl_str: The JSON Lines string to parse.

    Returns:
        Attribute name -> FuzzyPartition, in file order.
    """
    records = [json.loads(line) for line in jsonl_str.splitlines() if line.strip()]
    partitions = [
        FuzzyPartition.model_validate(record) for record in records if "attribute" in record
    ]
    return {partition.attribute: partition for partition in partitions}


def with_run_header(model: BaseModel, config: Dict[str, Any]) -> Dict[str, Any]:
    """Wrap a model dump with the format version and effective config echo."""
    return {
        "format_version": FORMAT_VERSION,
        "config": config,
        **model.model_dump(mode="json", exclude={"format_version", "config"}),
    }
