"""CSV and JSON emission of command results.

Every output starts with the effective run configuration: ``# key=value``
comment lines in CSV, a ``config`` object in JSON. Floats are written with
17 significant digits and infinities as ``inf``.
"""

import csv
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, TextIO

from pydantic import BaseModel

from fracpoisson.config import get_settings
from fracpoisson.schemas.run import OutputFormat, RunConfig

# Execution details that never change the numbers
_NOT_ECHOED = {"workers", "output"}
# Settings that only affect scheduling or logging; default_seed is echoed as seed
_SETTINGS_NOT_ECHOED = {"workers", "log_level", "log_json", "default_seed"}


@dataclass
class CommandResult:
    """Rows and summary produced by one subcommand."""

    columns: List[str]
    rows: List[Dict[str, Any]]
    summary: Dict[str, Any] = field(default_factory=dict)


def format_float(value: float) -> str:
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, ".17g")


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, Enum):
        return str(value.value)
    return str(value)


def jsonable(value: Any) -> Any:
    """Convert nested results into JSON-compatible values."""
    if isinstance(value, BaseModel):
        return jsonable(value.model_dump())
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, Enum):
        return value.value
    if hasattr(value, "item") and not isinstance(value, (str, bytes)):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return format_float(value)
    return value


def echoed_config(config: RunConfig) -> Dict[str, Any]:
    """Flat mapping of every result-relevant setting of the run."""
    dumped = config.model_dump(mode="json", exclude=_NOT_ECHOED)
    params = dumped.pop("params")
    settings = get_settings().model_dump(exclude=_SETTINGS_NOT_ECHOED)
    return {
        **dumped,
        **jsonable(params),
        **{f"settings.{key}": value for key, value in jsonable(settings).items()},
    }


def write_csv(stream: TextIO, config: RunConfig, result: CommandResult) -> None:
    for key, value in echoed_config(config).items():
        stream.write(f"# {key}={_cell(value)}\n")
    for key, value in result.summary.items():
        if not isinstance(value, (list, dict)):
            stream.write(f"# summary.{key}={_cell(value)}\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(result.columns)
    for row in result.rows:
        writer.writerow([_cell(row.get(column)) for column in result.columns])


def write_json(stream: TextIO, config: RunConfig, result: CommandResult) -> None:
    document = {
        "config": echoed_config(config),
        "rows": jsonable(result.rows),
        "summary": jsonable(result.summary),
    }
    json.dump(document, stream, indent=2, allow_nan=False)
    stream.write("\n")


def emit(stream: TextIO, config: RunConfig, result: CommandResult, fmt: Optional[OutputFormat] = None) -> None:
    """Write ``result`` in the configured format."""
    if (fmt or config.format) == OutputFormat.JSON:
        write_json(stream, config, result)
    else:
        write_csv(stream, config, result)
