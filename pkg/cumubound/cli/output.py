"""Rendering of command results as JSON, CSV or a plain text table.

Cells keep their exact form: Fractions print as "a/b", integers print in full
and floats use repr so they read back to the same value. The plain table never
carries ANSI escapes.
"""

import csv
import importlib.resources
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from cumubound.constants import SCHEMA_VERSION

FORMATS = ("json", "csv", "table")


@dataclass
class OutputRecord:
    command: str
    rows: list[dict] = field(default_factory=list)
    format: str = "table"
    schema_version: str = SCHEMA_VERSION
    # Set when a bound or converse check failed; drives exit code 1
    failed: bool = False

    def columns(self) -> list[str]:
        """Union of row keys in first-seen order."""
        seen = {}
        for row in self.rows:
            for key in row:
                seen.setdefault(key, None)
        return list(seen)


def json_cell(value):
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def text_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, str)):
        return str(value)
    if isinstance(value, Fraction):
        return str(value)
    value = float(value)
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(value)


def render_json(record: OutputRecord) -> str:
    document = {
        "schema_version": record.schema_version,
        "command": record.command,
        "rows": [{key: json_cell(value) for key, value in row.items()} for row in record.rows],
    }
    return json.dumps(document, indent=2) + "\n"


def render_csv(record: OutputRecord) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=record.columns(), restval="", lineterminator="\n")
    writer.writeheader()
    for row in record.rows:
        writer.writerow({key: text_cell(value) for key, value in row.items()})
    return buffer.getvalue()


def render_table(record: OutputRecord) -> str:
    columns = record.columns()
    if not columns:
        return ""
    cells = [[text_cell(row.get(column)) for column in columns] for row in record.rows]
    widths = [max([len(column)] + [len(line[i]) for line in cells]) for i, column in enumerate(columns)]
    lines = [
        "  ".join(column.ljust(width) for column, width in zip(columns, widths)).rstrip(),
        "  ".join("-" * width for width in widths),
    ]
    for line in cells:
        lines.append("  ".join(cell.rjust(width) for cell, width in zip(line, widths)).rstrip())
    return "\n".join(lines) + "\n"


_RENDERERS = {"json": render_json, "csv": render_csv, "table": render_table}


def render(record: OutputRecord) -> str:
    try:
        return _RENDERERS[record.format](record)
    except KeyError:
        raise ValueError(f"Unknown output format '{record.format}'") from None


def load_schema() -> dict:
    with importlib.resources.files("cumubound").joinpath("content/output_schema.json").open("r") as file:
        return json.load(file)
