"""
Console reporter: aligned plain-text tables, coloured selftest status.
"""

from typing import Any, Dict, List

from ..core.results import CheckStatus, ResultTable
from .base import BaseReporter


class ConsoleReporter(BaseReporter):
    """Human-readable table output."""

    def __init__(self, config: Dict[str, Any]):
        super().__init__(config)
        self.use_colors = config.get("color_output", True)

    @property
    def format_name(self) -> str:
        return "console"

    def _cell(self, column: str, value: Any) -> str:
        if isinstance(value, float):
            return f"{value:.6e}"
        return str(value)

    def _colour(self, text: str, raw: Any) -> str:
        try:
            status = CheckStatus(raw)
        except ValueError:
            return text
        return f"{status.color_code}{text}{status.reset_code}"

    def render(self, table: ResultTable) -> str:
        cells: List[List[str]] = [
            [self._cell(c, v) for c, v in zip(table.columns, row)] for row in table.rows
        ]
        widths = [
            max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(table.columns)
        ]
        lines = ["  ".join(c.ljust(w) for c, w in zip(table.columns, widths))]
        lines.append("  ".join("-" * w for w in widths))
        status_col = list(table.columns).index("status") if "status" in table.columns else None
        for raw, row in zip(table.rows, cells):
            parts = []
            for i, (text, w) in enumerate(zip(row, widths)):
                text = text.ljust(w)
                if self.use_colors and i == status_col:
                    text = self._colour(text, raw[i])
                parts.append(text)
            lines.append("  ".join(parts).rstrip())
        if table.summary:
            lines.append("")
            for key in sorted(table.summary):
                lines.append(f"{key}: {table.summary[key]}")
        return "\n".join(lines) + "\n"
