"""
dilutehom
=========

Boundary-integral toolkit for periodic homogenization of perforated domains
in the dilute regime: torus Green's functions, Nyström layer potentials,
cell problems, effective tensors and convergence-rate experiments on a
perforated disk.

Version: 0.1.0
License: MIT
"""

__version__ = "0.1.0"

from .core.config import Config
from .core.errors import DilutehomError, NumericalError, ValidationError
from .core.results import EffectiveTensor, PolarizationTensor

__all__ = [
    "Config",
    "DilutehomError",
    "EffectiveTensor",
    "NumericalError",
    "PolarizationTensor",
    "ValidationError",
]
