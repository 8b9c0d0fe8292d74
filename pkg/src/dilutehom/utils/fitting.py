"""
Log-log fits and bounded-ratio summaries used by convergence checks.
"""

from typing import Sequence

import numpy as np

from ..core.errors import DomainError


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of log|y| against log x."""
    x = np.asarray(x, dtype=float)
    y = np.abs(np.asarray(y, dtype=float))
    if x.size < 2:
        raise DomainError("need ≥ 2 points for slope")
    if x.size != y.size:
        raise DomainError(f"slope fit got {x.size} abscissae and {y.size} values")
    if np.any(x <= 0) or np.any(y <= 0):
        raise DomainError("slope fit needs positive abscissae and nonzero values")
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def ratio_spread(values: Sequence[float]) -> float:
    """max/min of positive values; 1.0 means perfectly constant."""
    v = np.abs(np.asarray(values, dtype=float))
    if v.size == 0:
        raise DomainError("spread of an empty sequence")
    if np.min(v) == 0:
        return float("inf")
    return float(np.max(v) / np.min(v))
