"""
η sweeps of cell solves: tensor tables, dilute residual fits and continuity scans.

Each solve is an independent task dispatched through ``ordered_map``.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..cell.diagnostics import chi_diagnostics
from ..cell.solver import CellSolution, chi_expansion_gap, solve_cell, solve_exterior
from ..core.errors import DomainError, UnsupportedError
from ..core.results import EffectiveTensor, ResultTable
from ..geometry.curves import HoleShape
from ..green.torus import TorusGreen
from ..utils.fitting import loglog_slope
from ..utils.parallel import ordered_map
from .tensor import (
    effective,
    effective_sphere,
    expansion_residual,
    polarization_for,
    second_order_coefficient,
    volume_fraction,
)


logger = logging.getLogger("dilutehom.homogenization")

TENSOR_COLUMNS = ("eta", "a11", "a12", "a22", "residual", "mineig")
CONTINUITY_COLUMNS = ("eta", "a11", "a12", "a22", "mineig", "jump")
CELL_COLUMNS = (
    "eta", "k", "residual", "mean", "sup_chi", "sup_grad_chi",
    "l2_chi", "l2_grad_chi", "density_gap", "expansion_gap", "leading_gap",
)


@dataclass(frozen=True)
class SweepTask:
    """Picklable description of one cell solve."""
    shape: HoleShape
    eta: float
    green: TorusGreen
    method: str = "direct"
    series_terms: int = 3
    series_max_eta: float = 0.5
    max_upsample: int = 64

    def solve(self) -> CellSolution:
        return solve_cell(
            self.shape,
            self.eta,
            method=self.method,
            green=self.green,
            series_terms=self.series_terms,
            series_max_eta=self.series_max_eta,
            max_upsample=self.max_upsample,
        )


def _tensor_worker(task: SweepTask) -> EffectiveTensor:
    return effective(task.solve())


def _cell_worker(task: SweepTask) -> List[Tuple]:
    sol = task.solve()
    ext = solve_exterior(task.shape, task.max_upsample)
    diag = chi_diagnostics(sol)
    gap = chi_expansion_gap(task.shape, task.eta, exterior=ext, cell=sol)
    leading = chi_expansion_gap(task.shape, task.eta, exterior=ext, cell=sol, leading=True)
    return [
        (
            task.eta, k + 1, sol.residual(), sol.densities[k].integral,
            diag.sup_chi, diag.sup_grad_chi, diag.l2_chi_torus, diag.l2_grad_chi_torus,
            sol.densities[k].sup_distance(ext.densities[k]), gap, leading,
        )
        for k in range(sol.dim)
    ]


def _tasks(shape: HoleShape, etas: Sequence[float], green: Optional[TorusGreen], **options) -> List[SweepTask]:
    if shape.dim != 2:
        raise UnsupportedError("cell solves run in d = 2 only; use the sphere formulas in d = 3")
    green = green or TorusGreen()
    return [SweepTask(shape, float(eta), green, **options) for eta in etas]


def tensor_sweep(
    shape: HoleShape,
    etas: Sequence[float],
    green: Optional[TorusGreen] = None,
    jobs: int = 1,
    **options,
) -> List[EffectiveTensor]:
    """Ā(η) for every η, in input order."""
    if shape.dim == 3:
        return [effective_sphere(shape.sphere_radius, float(eta)) for eta in etas]
    tasks = _tasks(shape, etas, green, **options)
    logger.info(f"Computing {len(tasks)} effective tensors for {shape.label}")
    return ordered_map(_tensor_worker, tasks, jobs)


def cell_sweep(
    shape: HoleShape,
    etas: Sequence[float],
    green: Optional[TorusGreen] = None,
    jobs: int = 1,
    **options,
) -> ResultTable:
    """Per-(η, k) residuals, norms and expansion gaps."""
    tasks = _tasks(shape, etas, green, **options)
    logger.info(f"Solving {len(tasks)} cell problems for {shape.label}")
    table = ResultTable("cell", CELL_COLUMNS)
    for rows in ordered_map(_cell_worker, tasks, jobs):
        for row in rows:
            table.add_row(*row)
    table.summary = {"shape": shape.label, "n_nodes": shape.n_nodes}
    return table


def homogenized_gap_bound(shape: HoleShape, eta: float, green: Optional[TorusGreen] = None) -> float:
    """‖Ā(η) − I‖_max; exactly 0 at η = 0."""
    if eta == 0:
        return 0.0
    tensor = tensor_sweep(shape, [eta], green=green)[0]
    return float(np.max(np.abs(tensor.matrix - np.eye(tensor.dim))))


def tensor_table(
    shape: HoleShape,
    etas: Sequence[float],
    green: Optional[TorusGreen] = None,
    jobs: int = 1,
    **options,
) -> ResultTable:
    """
    Ā(η) rows with the dilute residual ‖Ā(η) − (I − η^d M)‖_max.

    The log-log slope and the fitted η^{2d} coefficient join the summary once
    two or more η values of a d = 2 shape are given.

    Raises:
        DomainError: Empty η list.
    """
    etas = [float(e) for e in etas]
    if not etas:
        raise DomainError("empty eta list")
    pol = polarization_for(shape)
    tensors = tensor_sweep(shape, etas, green=green, jobs=jobs, **options)
    table = ResultTable("tensor", TENSOR_COLUMNS)
    residuals: List[float] = []
    for t in tensors:
        res = expansion_residual(t, pol.matrix)
        residuals.append(res)
        table.add_row(t.eta, t.matrix[0, 0], t.matrix[0, 1], t.matrix[1, 1], res, t.min_eigenvalue)
    summary: Dict[str, object] = {
        "shape": shape.label,
        "n_nodes": shape.n_nodes,
        "polarization": pol.matrix.tolist(),
        "volume_fractions": [volume_fraction(shape, e) for e in etas],
        "max_symmetry_defect": max(t.symmetry_defect for t in tensors),
        "min_eigenvalue": min(t.min_eigenvalue for t in tensors),
    }
    if len(etas) >= 2 and shape.dim == 2:
        smallest = min(tensors, key=lambda t: t.eta)
        summary["slope"] = loglog_slope(etas, residuals)
        summary["leading_ratio"] = ((np.eye(2) - smallest.matrix) / smallest.eta**2).tolist()
        summary["second_order_coefficient"] = second_order_coefficient(tensors, pol.matrix)
        logger.info(f"Dilute residual slope {summary['slope']:.3f} over {len(etas)} values of η")
    table.summary = summary
    return table


def dilute_residual(
    shape: HoleShape,
    etas: Sequence[float],
    green: Optional[TorusGreen] = None,
    jobs: int = 1,
    **options,
) -> Tuple[ResultTable, float]:
    """
    Residuals ‖Ā(η) − (I − η^d M)‖_max over an η list and their log-log slope.

    Raises:
        DomainError: Fewer than two η values.
        UnsupportedError: d = 3 shapes (only the leading order is available there).
    """
    if len(etas) < 2:
        raise DomainError("need ≥ 2 points for slope")
    if shape.dim != 2:
        raise UnsupportedError("the dilute residual needs a d = 2 boundary element shape")
    table = tensor_table(shape, etas, green=green, jobs=jobs, **options)
    return table, float(table.summary["slope"])


def continuity_scan(
    shape: HoleShape,
    etas: Sequence[float],
    green: Optional[TorusGreen] = None,
    jobs: int = 1,
) -> ResultTable:
    """Ā on an η grid with adjacent jumps, definiteness and monotonicity summary."""
    etas = sorted(float(e) for e in etas)
    if any(not 0.0 < e <= 0.9 for e in etas):
        raise DomainError("continuity grid must lie in (0, 0.9]")
    tensors = tensor_sweep(shape, etas, green=green, jobs=jobs)
    table = ResultTable("continuity", CONTINUITY_COLUMNS)
    jumps: List[float] = []
    prev: Optional[EffectiveTensor] = None
    for t in tensors:
        jump = 0.0
        if prev is not None:
            jump = float(np.max(np.abs(t.matrix - prev.matrix)))
            jumps.append(jump)
        table.add_row(t.eta, t.matrix[0, 0], t.matrix[0, 1], t.matrix[1, 1], t.min_eigenvalue, jump)
        prev = t
    a11 = [t.matrix[0, 0] for t in tensors]
    summary: Dict[str, object] = {
        "max_jump": max(jumps) if jumps else 0.0,
        "positive_definite": all(t.min_eigenvalue > 0 for t in tensors),
        "max_symmetry_defect": max(t.symmetry_defect for t in tensors),
        "monotone_decreasing": bool(np.all(np.diff(a11) <= 0)),
    }
    table.summary = summary
    return table
