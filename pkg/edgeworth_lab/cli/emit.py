#
# edgeworth-lab - Exact and asymptotic CLT errors of atomic sums
#
# Copyright (C) 2026      The edgeworth-lab developers
#
# This program is free software; you can redistribute it and/or modify
# it under the terms of the GNU Affero General Public License as published by
# the Free Software Foundation; either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU Affero General Public License for more details.
#
# You should have received a copy of the GNU Affero General Public License
# along with this program. If not, see <https://www.gnu.org/licenses/>.
#

"""Output envelope and CSV/JSON emitters."""

import csv
import io
import json
import logging
import math
from functools import lru_cache
from typing import Any, Dict, Sequence, Tuple

import numpy as np
import yaml
from jsonschema import ValidationError, validate

from ..const import FORMAT_CSV, FORMAT_JSON, REPORT_SCHEMA, SCHEMA_VERSION
from ..errors import IoError
from ..types import FilenameOrPath

LOG = logging.getLogger(__name__)

Table = Tuple[Sequence[str], Sequence[Sequence[Any]]]


def default(obj: Any):
    """Handle unserializable objects."""
    LOG.error("Unexpected object type: " + obj.__class__.__name__)
    return None


def plain(obj: Any) -> Any:
    """Return ``obj`` with numpy values as Python values and non-finite floats as None."""
    if isinstance(obj, dict):
        return {str(key): plain(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(value) for value in obj]
    if isinstance(obj, np.ndarray):
        return [plain(value) for value in obj.tolist()]
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


@lru_cache(maxsize=1)
def report_schema() -> Dict[str, Any]:
    with open(REPORT_SCHEMA) as file_handle:
        return yaml.safe_load(file_handle)


def envelope(config_echo: Dict[str, Any], results: Dict[str, Any]) -> Dict[str, Any]:
    """Return the validated output envelope."""
    data = plain(
        {"schema_version": SCHEMA_VERSION, "config_echo": config_echo, "results": results}
    )
    schema = report_schema()
    try:
        validate(data, schema)
        if config_echo.get("subcommand") == "harness":
            validate(data["results"], schema["definitions"]["harness_report"])
    except ValidationError as err:
        raise IoError("envelope does not match the report schema: {}".format(err.message))
    return data


def _cell(value: Any) -> str:
    value = plain(value)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, list):
        return ";".join(_cell(item) for item in value)
    return str(value)


def render_csv(table: Table) -> str:
    """Return a header row and one line per row, LF terminated."""
    columns, rows = table
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(list(columns))
    for row in rows:
        writer.writerow([_cell(value) for value in row])
    return buffer.getvalue()


def render_json(data: Any) -> str:
    return (
        json.dumps(
            plain(data), ensure_ascii=False, sort_keys=True, indent=2, default=default
        )
        + "\n"
    )


def render(results: Any, fmt: str) -> str:
    if fmt == FORMAT_CSV:
        return render_csv(results)
    if fmt == FORMAT_JSON:
        return render_json(results)
    raise IoError("unknown format {}".format(fmt))


def emit(results: Any, fmt: str, path: FilenameOrPath) -> int:
    """Write ``results`` to ``path`` and return the number of bytes written.

    ``results`` is a ``(columns, rows)`` table for CSV and any JSON-compatible
    value for JSON.
    """
    payload = render(results, fmt).encode("utf-8")
    try:
        with open(path, "wb") as file_handle:
            file_handle.write(payload)
    except OSError as err:
        raise IoError("cannot write {}: {}".format(path, err)) from err
    LOG.info("Wrote {} bytes to {}".format(len(payload), path))
    return len(payload)
