"""
Report generators for dilutehom result tables.
"""

from .base import BaseReporter
from .console import ConsoleReporter
from .csv_reporter import CSVReporter
from .factory import ReporterFactory
from .json_reporter import JSONReporter
from .svg_reporter import SVGReporter

__all__ = [
    "BaseReporter",
    "CSVReporter",
    "ConsoleReporter",
    "JSONReporter",
    "ReporterFactory",
    "SVGReporter",
]
