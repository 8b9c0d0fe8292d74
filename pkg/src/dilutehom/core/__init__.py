"""
Core module for dilutehom.

Contains configuration management, the exception hierarchy
and the result records shared by solvers and reporters.
"""

from .config import Config
from .errors import (
    AccuracyWarning,
    ConfigError,
    DilutehomError,
    DomainError,
    GeometryError,
    NumericalError,
    SeriesDivergenceError,
    SolverError,
    UnsupportedError,
    ValidationError,
)
from .results import CheckResult, CheckStatus, EffectiveTensor, PolarizationTensor

__all__ = [
    "Config",
    "DilutehomError",
    "ValidationError",
    "ConfigError",
    "GeometryError",
    "DomainError",
    "UnsupportedError",
    "NumericalError",
    "SolverError",
    "SeriesDivergenceError",
    "AccuracyWarning",
    "CheckResult",
    "CheckStatus",
    "EffectiveTensor",
    "PolarizationTensor",
]
