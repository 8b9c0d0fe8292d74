"""
Cell problems: the exterior Neumann problem and the rescaled periodic problem.
"""

from .diagnostics import ChiDiagnostics, chi_diagnostics, energy_identity, rotation_mismatch
from .solver import (
    CellSolution,
    ExteriorSolution,
    chi_expansion_gap,
    solve_cell,
    solve_exterior,
)

__all__ = [
    "CellSolution",
    "ChiDiagnostics",
    "ExteriorSolution",
    "chi_diagnostics",
    "chi_expansion_gap",
    "energy_identity",
    "rotation_mismatch",
    "solve_cell",
    "solve_exterior",
]
