"""
Layer potentials: Nyström operators, off-boundary evaluation and
Neumann-series inversion.
"""

from .evaluation import BoundaryEvaluator, eval_grad_potential, eval_potential
from .nystrom import (
    BoundaryDensity,
    DenseSystem,
    NystromOperator,
    OperatorKind,
    assemble_free,
    assemble_periodic,
    assemble_q,
)
from .series import NeumannSeries, neumann_series_inverse, neumann_series_terms

__all__ = [
    "BoundaryDensity",
    "BoundaryEvaluator",
    "DenseSystem",
    "NeumannSeries",
    "NystromOperator",
    "OperatorKind",
    "assemble_free",
    "assemble_periodic",
    "assemble_q",
    "eval_grad_potential",
    "eval_potential",
    "neumann_series_inverse",
    "neumann_series_terms",
]
