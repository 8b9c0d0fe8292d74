"""
Check registry for the selftest command.

This module manages the registration and instantiation of acceptance checks.
"""

import logging
from typing import Dict, List, Optional, Sequence, Type

from ..core.errors import ConfigError
from ..core.results import CheckResult, CheckStatus
from .base import BaseCheck, CheckContext


class CheckRegistry:
    """
    Registry for managing acceptance checks.

    Checks run in registration order so reports are reproducible.
    """

    def __init__(self, context: Optional[CheckContext] = None):
        self.context = context or CheckContext()
        self.logger = logging.getLogger("dilutehom.checks")
        self._check_classes: Dict[str, Type[BaseCheck]] = {}

        self._register_builtin_checks()

    def _register_builtin_checks(self) -> None:
        from .builtin import BUILTIN_CHECKS

        for check_class in BUILTIN_CHECKS:
            self.register_check(check_class.name, check_class)
        self.logger.debug(f"Registered {len(self._check_classes)} built-in checks")

    def register_check(self, name: str, check_class: Type[BaseCheck]) -> None:
        """
        Register a check class.

        Raises:
            ValueError: The class does not derive from BaseCheck.
        """
        if not isinstance(check_class, type) or not issubclass(check_class, BaseCheck):
            raise ValueError(f"Check class must inherit from BaseCheck: {check_class}")
        self._check_classes[name] = check_class
        self.logger.debug(f"Registered check: {name}")

    def list_available_checks(self) -> List[str]:
        return list(self._check_classes)

    def describe(self) -> Dict[str, str]:
        """Name → description, with slow checks marked."""
        out = {}
        for name, cls in self._check_classes.items():
            out[name] = cls.description + (" (slow)" if cls.slow else "")
        return out

    def create_check(self, name: str) -> BaseCheck:
        if name not in self._check_classes:
            raise ConfigError(
                f"Unknown check: {name}. Available checks: {self.list_available_checks()}"
            )
        return self._check_classes[name](self.context)

    def run(self, only: Sequence[str] = (), skip_slow: bool = False) -> List[CheckResult]:
        """
        Run the selected checks (all when ``only`` is empty).

        Skipped slow checks are reported with status SKIP.
        """
        names = list(only) or self.list_available_checks()
        results: List[CheckResult] = []
        for name in names:
            check = self.create_check(name)
            if skip_slow and check.slow:
                results.append(
                    CheckResult(name, CheckStatus.SKIP, float("nan"), check.threshold, "slow check skipped")
                )
                continue
            self.logger.info(f"Running check {name}")
            results.append(check.run())
        failed = sum(1 for r in results if r.status is CheckStatus.FAIL)
        self.logger.info(f"{len(results)} checks run, {failed} failed")
        return results
