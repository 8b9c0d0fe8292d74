"""
Reporter factory for dilutehom.
"""

import logging
from typing import Any, Dict, List, Optional, Type

from .base import BaseReporter
from .console import ConsoleReporter
from .csv_reporter import CSVReporter
from .json_reporter import JSONReporter
from .svg_reporter import SVGReporter


class ReporterFactory:
    """
    Factory class for creating report generators.

    Args:
        command: Subcommand name written into every report.
        run_config: Canonical configuration dictionary echoed by the reports.
    """

    def __init__(self, command: str, run_config: Dict[str, Any], color_output: bool = True):
        self.command = command
        self.run_config = run_config
        self.color_output = color_output
        self.logger = logging.getLogger("dilutehom.reporter")

        self._reporters: Dict[str, Type[BaseReporter]] = {
            "console": ConsoleReporter,
            "csv": CSVReporter,
            "json": JSONReporter,
            "svg": SVGReporter,
        }

    def register_reporter(self, format_name: str, reporter_class: Type[BaseReporter]) -> None:
        if not issubclass(reporter_class, BaseReporter):
            raise ValueError(f"Reporter class must inherit from BaseReporter: {reporter_class}")
        self._reporters[format_name] = reporter_class
        self.logger.debug(f"Registered reporter: {format_name}")

    def create_reporter(
        self,
        format_name: str,
        y_columns: Optional[List[str]] = None,
        x_column: Optional[str] = None,
    ) -> BaseReporter:
        """
        Raises:
            ValueError: If the format is not supported.
        """
        if format_name not in self._reporters:
            raise ValueError(
                f"Unsupported report format: {format_name}. "
                f"Available formats: {self.get_available_formats()}"
            )
        config = {
            "command": self.command,
            "config": self.run_config,
            "color_output": self.color_output,
            "y_columns": y_columns,
            "x_column": x_column,
        }
        return self._reporters[format_name](config)

    def get_available_formats(self) -> List[str]:
        return list(self._reporters)
