"""
Base reporter class for dilutehom result tables.
"""

import json
import math
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict

import numpy as np

from ..core.results import ResultTable


def clean_value(value: Any) -> Any:
    """numpy scalars to Python, non-finite floats to None."""
    if isinstance(value, np.ndarray):
        value = value.tolist()
    elif isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {str(k): clean_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [clean_value(v) for v in value]
    return value


class BaseReporter(ABC):
    """
    Abstract base class for all report generators.

    Reporters are pure functions of the table and the configuration echo, so
    identical inputs always render to identical text.
    """

    extension = "txt"

    def __init__(self, config: Dict[str, Any]):
        """
        Initialize the reporter.

        Args:
            config: ``command`` and ``config`` (the canonical run configuration).
        """
        self.config = config
        self.command = config.get("command", "run")
        self.run_config = clean_value(config.get("config", {}))

    @property
    @abstractmethod
    def format_name(self) -> str:
        """Return the name of this report format."""

    @abstractmethod
    def render(self, table: ResultTable) -> str:
        """Render the table to text."""

    def config_echo(self) -> str:
        return json.dumps(self.run_config, sort_keys=True, separators=(",", ":"))

    def write(self, table: ResultTable, path: str) -> Path:
        out = Path(path)
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", encoding="utf-8", newline="") as f:
            f.write(self.render(table))
        return out
