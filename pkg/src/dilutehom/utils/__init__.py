"""
Utility helpers for dilutehom.
"""

from .fitting import loglog_slope, ratio_spread
from .parallel import ordered_map

__all__ = ["loglog_slope", "ordered_map", "ratio_spread"]
