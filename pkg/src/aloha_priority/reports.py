"""Dataset and report serialization for the command-line surface.

Two formats, csv and json, carrying identical field names.  Floats are
rendered with repr, the shortest string that parses back to the exact same
double, so every emitted dataset re-parses to identical values and repeated
runs are byte-identical.  Tabular datasets become csv tables or a json
object {"columns": [...], "rows": [[...]]}; scalar reports become two-column
field/value csv or a flat json object.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Any


def _py(value: Any) -> Any:
    """Collapse numpy scalars to plain Python types at the emit boundary."""
    if hasattr(value, "item"):
        value = value.item()
    if isinstance(value, bool):
        return int(value)
    return value


def _render(value: Any) -> Any:
    value = _py(value)
    if isinstance(value, float):
        return repr(value)
    return value


def table_to_csv(columns: list[str], rows: list[list[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_render(v) for v in row])
    return buf.getvalue()


def table_to_json(columns: list[str], rows: list[list[Any]]) -> str:
    payload = {"columns": columns, "rows": [[_py(v) for v in row] for row in rows]}
    return json.dumps(payload, indent=2) + "\n"


def report_to_csv(report: dict[str, Any]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["field", "value"])
    for key, value in report.items():
        writer.writerow([key, _render(value)])
    return buf.getvalue()


def report_to_json(report: dict[str, Any]) -> str:
    return json.dumps({k: _py(v) for k, v in report.items()}, indent=2) + "\n"


def emit_table(columns: list[str], rows: list[list[Any]], fmt: str) -> str:
    if fmt == "csv":
        return table_to_csv(columns, rows)
    if fmt == "json":
        return table_to_json(columns, rows)
    raise ValueError(f"unknown format {fmt!r}")


def emit_report(report: dict[str, Any], fmt: str) -> str:
    if fmt == "csv":
        return report_to_csv(report)
    if fmt == "json":
        return report_to_json(report)
    raise ValueError(f"unknown format {fmt!r}")


def _coerce(text: str) -> Any:
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def parse_csv_table(text: str) -> tuple[list[str], list[list[Any]]]:
    """Inverse of table_to_csv, numbers coerced back to int/float."""
    reader = csv.reader(io.StringIO(text))
    columns = next(reader)
    rows = [[_coerce(cell) for cell in row] for row in reader if row]
    return columns, rows


def parse_json_table(text: str) -> tuple[list[str], list[list[Any]]]:
    payload = json.loads(text)
    return payload["columns"], payload["rows"]


def parse_csv_report(text: str) -> dict[str, Any]:
    columns, rows = parse_csv_table(text)
    if columns != ["field", "value"]:
        raise ValueError("not a field/value report")
    return {row[0]: row[1] for row in rows}


def parse_json_report(text: str) -> dict[str, Any]:
    return json.loads(text)
