"""
Base class for selftest acceptance checks.
"""

import logging
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property

from ..core.config import Config
from ..core.errors import DilutehomError
from ..core.results import CheckResult, CheckStatus
from ..geometry.curves import HoleShape, circle_shape
from ..green.torus import TorusGreen


@dataclass
class CheckContext:
    """Shared inputs of one selftest run; expensive objects are built once."""
    config: Config = field(default_factory=Config)
    perturb_weight: float = 0.0

    @cached_property
    def green(self) -> TorusGreen:
        return TorusGreen.from_config(self.config.green)

    def circle(self, radius: float = 0.25, n_nodes: int = 64) -> HoleShape:
        """Reference circle, with node 0's weight scaled by (1 + perturb_weight)."""
        shape = circle_shape(radius, n_nodes)
        if self.perturb_weight:
            shape = shape.with_weight_perturbation(self.perturb_weight)
        return shape


class BaseCheck(ABC):
    """
    Abstract base class for all acceptance checks.

    A check measures one non-negative error quantity and passes when it does
    not exceed ``threshold``.
    """

    slow: bool = False

    def __init__(self, context: CheckContext):
        self.context = context
        self.logger = logging.getLogger(f"dilutehom.checks.{self.name}")

    @property
    @abstractmethod
    def name(self) -> str:
        """Return the name of this check."""

    @property
    @abstractmethod
    def description(self) -> str:
        """Return what this check verifies."""

    @property
    @abstractmethod
    def threshold(self) -> float:
        """Largest acceptable measured value."""

    @abstractmethod
    def measure(self) -> float:
        """Compute the error quantity."""

    def run(self) -> CheckResult:
        start = time.perf_counter()
        try:
            measured = float(self.measure())
        except DilutehomError as e:
            self.logger.error(f"{self.name} raised: {e}")
            return CheckResult(self.name, CheckStatus.FAIL, float("nan"), self.threshold, str(e))
        elapsed = time.perf_counter() - start
        status = CheckStatus.PASS if measured <= self.threshold else CheckStatus.FAIL
        self.logger.debug(f"{self.name}: {measured:.3e} in {elapsed:.2f}s")
        return CheckResult(self.name, status, measured, self.threshold, self.description)
