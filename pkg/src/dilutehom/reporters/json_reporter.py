"""
JSON reporter for dilutehom result tables.
"""

import json
from typing import Any, List

from .. import __version__
from ..core.results import ResultTable
from .base import BaseReporter, clean_value
from .models import CheckModel, ReportModel, TableModel


class JSONReporter(BaseReporter):
    """
    JSON reporter validated through pydantic models; keys are sorted and no
    timestamps are written.
    """

    extension = "json"

    @property
    def format_name(self) -> str:
        return "json"

    def _rows(self, table: ResultTable) -> List[List[Any]]:
        rows = [clean_value(list(r)) for r in table.rows]
        if table.name == "selftest":
            # one validated check per row
            for row in rows:
                CheckModel(**dict(zip(table.columns, row)))
        return rows

    def build_model(self, table: ResultTable) -> ReportModel:
        return ReportModel(
            version=__version__,
            command=self.command,
            config=self.run_config,
            table=TableModel(
                name=table.name,
                columns=list(table.columns),
                rows=self._rows(table),
                summary=clean_value(table.summary),
            ),
        )

    def render(self, table: ResultTable) -> str:
        report = self.build_model(table)
        return json.dumps(report.model_dump(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"
