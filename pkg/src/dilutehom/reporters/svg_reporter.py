"""
SVG line charts of result tables.
"""

import io
import logging
from typing import List

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from ..core.results import ResultTable  # noqa: E402
from .base import BaseReporter  # noqa: E402


logger = logging.getLogger("dilutehom.reporter")


class SVGReporter(BaseReporter):
    """
    Line chart of the numeric columns against the first (or configured) column.

    Log-log axes are used when every plotted value is positive. Output is
    deterministic: fixed hash salt and no date metadata.
    """

    extension = "svg"

    @property
    def format_name(self) -> str:
        return "svg"

    def _series(self, table: ResultTable) -> List[str]:
        wanted = self.config.get("y_columns")
        if wanted:
            return [c for c in wanted if c in table.columns]
        out = []
        x_name = self.config.get("x_column") or table.columns[0]
        for name in table.columns:
            if name == x_name:
                continue
            values = table.column(name)
            if values and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
                out.append(name)
        return out

    def render(self, table: ResultTable) -> str:
        x_name = self.config.get("x_column") or table.columns[0]
        x = np.asarray(table.column(x_name), dtype=float)
        series = self._series(table)
        with plt.rc_context({"svg.hashsalt": "dilutehom", "svg.fonttype": "none"}):
            fig, ax = plt.subplots(figsize=(6, 4))
            positive = bool(np.all(x > 0))
            for name in series:
                y = np.asarray(table.column(name), dtype=float)
                positive &= bool(np.all(np.abs(y) > 0))
                ax.plot(x, np.abs(y), marker="o", label=name)
            if positive and series:
                ax.set_xscale("log")
                ax.set_yscale("log")
            ax.set_xlabel(x_name)
            ax.set_title(f"dilutehom {self.command}: {table.name}")
            if series:
                ax.legend()
            ax.grid(True, which="both", ls="--")
            buf = io.StringIO()
            fig.savefig(buf, format="svg", metadata={"Date": None})
            plt.close(fig)
        logger.debug(f"Rendered {len(series)} series of {table.name} to SVG")
        return buf.getvalue()
