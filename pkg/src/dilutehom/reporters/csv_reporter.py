"""
CSV reporter: metadata comment, header row, full-precision floats.
"""

import csv
import io
from typing import Any

from ..core.results import ResultTable
from .base import BaseReporter


def format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if hasattr(value, "item"):
        value = value.item()
    if isinstance(value, float):
        return "%.17g" % value
    return str(value)


class CSVReporter(BaseReporter):
    """RFC-4180 CSV with a leading ``# dilutehom <command> config=<json>`` line."""

    extension = "csv"

    @property
    def format_name(self) -> str:
        return "csv"

    def render(self, table: ResultTable) -> str:
        buf = io.StringIO()
        buf.write(f"# dilutehom {self.command} config={self.config_echo()}\r\n")
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(list(table.columns))
        for row in table.rows:
            writer.writerow([format_cell(v) for v in row])
        return buf.getvalue()
