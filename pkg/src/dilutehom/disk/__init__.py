"""
Full problem on a perforated disk: domain, dense BEM solves, corrector and rate sweeps.
"""

from .corrector import (
    CorrectorField,
    Discrepancy,
    corrector_field,
    h1_discrepancy,
    homogenized_gradient_gap,
    homogenized_sup_gap,
    sampling_grid,
)
from .domain import PerforatedDiskProblem, build_domain, hole_centers
from .polynomials import Polynomial2D
from .rates import (
    RegimeInfo,
    SolvedInstance,
    critical_scales,
    rate_sweep,
    regime_classify,
    solve_instance,
)
from .solver import FullSolution, HomogenizedSolution, solve_full, solve_homogenized

__all__ = [
    "CorrectorField",
    "Discrepancy",
    "FullSolution",
    "HomogenizedSolution",
    "PerforatedDiskProblem",
    "Polynomial2D",
    "RegimeInfo",
    "SolvedInstance",
    "build_domain",
    "corrector_field",
    "critical_scales",
    "h1_discrepancy",
    "hole_centers",
    "homogenized_gradient_gap",
    "homogenized_sup_gap",
    "rate_sweep",
    "regime_classify",
    "sampling_grid",
    "solve_full",
    "solve_homogenized",
    "solve_instance",
]
