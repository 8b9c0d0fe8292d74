"""
Acceptance checks behind ``dilutehom selftest``.
"""

from .base import BaseCheck, CheckContext
from .registry import CheckRegistry

__all__ = ["BaseCheck", "CheckContext", "CheckRegistry"]
