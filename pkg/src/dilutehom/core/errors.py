"""
Exception hierarchy for dilutehom.

Every error carries the process exit code the CLI reports for it.
"""

from typing import Optional


class DilutehomError(Exception):
    """Base class for all dilutehom errors."""

    exit_code: int = 1


class ValidationError(DilutehomError, ValueError):
    """Invalid input detected before or during setup (exit code 2)."""

    exit_code = 2


class ConfigError(ValidationError):
    """Configuration file or option values are invalid."""


class GeometryError(ValidationError):
    """A hole shape violates a geometric assumption."""


class DomainError(ValidationError):
    """A parameter or evaluation point lies outside its admissible range."""


class UnsupportedError(ValidationError):
    """The request is well formed but outside what the solvers handle."""


class NumericalError(DilutehomError, ArithmeticError):
    """A computation failed numerically (exit code 3)."""

    exit_code = 3


class SolverError(NumericalError):
    """A dense linear solve failed or produced a non-finite result."""

    def __init__(self, message: str, condition: Optional[float] = None):
        if condition is not None:
            message = f"{message} (condition estimate {condition:.3e})"
        super().__init__(message)
        self.condition = condition


class SeriesDivergenceError(NumericalError):
    """The Neumann series terms stopped decaying."""


class AccuracyWarning(UserWarning):
    """Off-boundary evaluation closer to a boundary than the quadrature guard."""

    def __init__(self, message: str, distance: float):
        super().__init__(message)
        self.distance = distance
