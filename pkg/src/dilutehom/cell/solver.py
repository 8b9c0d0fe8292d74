"""
Exterior Neumann problem and rescaled cell problem for a model hole.

The exterior problem seeks w⁰_k = S[φ⁰_k] with (½I + K*)φ⁰_k = −N^k. The cell
problem on the rescaled torus (1/η)T² seeks χ̃^η_k = S^η_p[φ_{k,η}] with
(½I + K^{η,*}_p)φ_{k,η} = −N^k; on the unit torus χ_{k,η}(y) = η χ̃^η_k(y/η).
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from ..core.errors import DomainError, SeriesDivergenceError, UnsupportedError
from ..geometry.curves import HoleShape
from ..green.torus import GreenEta, TorusGreen
from ..potentials.evaluation import BoundaryEvaluator
from ..potentials.nystrom import (
    BoundaryDensity,
    DenseSystem,
    OperatorKind,
    assemble_free,
    assemble_periodic,
    assemble_q,
    second_kind,
)
from ..potentials.series import NeumannSeries


logger = logging.getLogger("dilutehom.cell")


def _check_eta(eta: float) -> None:
    if not 0.0 < eta <= 1.0:
        raise DomainError(f"eta must be in (0,1], got {eta}")


def _normal_rhs(shape: HoleShape, k: int) -> np.ndarray:
    return -shape.normals[:, k]


@dataclass(eq=False)
class ExteriorSolution:
    """Densities φ⁰_k of the exterior Neumann problem and evaluators of w⁰_k."""
    shape: HoleShape
    densities: Tuple[BoundaryDensity, ...]
    system: DenseSystem = field(repr=False)
    single_layer: np.ndarray = field(repr=False)
    max_upsample: int = 64

    def __post_init__(self):
        self._evaluator = BoundaryEvaluator(self.shape, self.max_upsample)

    @property
    def dim(self) -> int:
        return len(self.densities)

    def boundary_w(self, k: int) -> np.ndarray:
        """w⁰_k on the boundary nodes."""
        return self.single_layer @ self.densities[k].values

    def w(self, k: int, z) -> np.ndarray:
        return self._evaluator.single_layer(self.densities[k].values, z)

    def grad_w(self, k: int, z) -> np.ndarray:
        return self._evaluator.grad_single_layer(self.densities[k].values, z)

    def residual(self) -> float:
        return max(
            self.system.residual(d.values, _normal_rhs(self.shape, k))
            for k, d in enumerate(self.densities)
        )

    def max_mean(self) -> float:
        return max(abs(d.integral) for d in self.densities)


def solve_exterior(shape: HoleShape, max_upsample: int = 64) -> ExteriorSolution:
    """
    Solve (½I + K*)φ⁰_k = −N^k for k = 1..d by a dense LU solve.

    Raises:
        SolverError: The system could not be factorized.
    """
    if shape.dim != 2:
        raise UnsupportedError("boundary element solves need d = 2; use the sphere formulas in d = 3")
    system = DenseSystem(second_kind(assemble_free(shape, OperatorKind.KSTAR)), "½I + K*")
    densities = tuple(
        BoundaryDensity(shape, system.solve(_normal_rhs(shape, k))) for k in range(2)
    )
    single = assemble_free(shape, OperatorKind.S).matrix
    sol = ExteriorSolution(shape, densities, system, single, max_upsample)
    logger.debug(
        f"Exterior problem on {shape.label}: residual {sol.residual():.2e}, "
        f"max |∫φ| {sol.max_mean():.2e}"
    )
    return sol


@dataclass(eq=False)
class CellSolution:
    """Densities φ_{k,η} of the rescaled cell problem and field evaluators."""
    shape: HoleShape
    eta: float
    densities: Tuple[BoundaryDensity, ...]
    method: str
    green: GreenEta
    operator: np.ndarray = field(repr=False)
    periodic_single_layer: np.ndarray = field(repr=False)
    max_upsample: int = 64

    def __post_init__(self):
        self._evaluator = BoundaryEvaluator(self.shape, self.max_upsample)

    @property
    def dim(self) -> int:
        return len(self.densities)

    @property
    def half_width(self) -> float:
        """Half side of the rescaled cell (1/η)T²."""
        return 0.5 / self.eta

    def wrap(self, z) -> np.ndarray:
        """Reduce rescaled coordinates to the cell |z_i| ≤ 1/(2η)."""
        z = np.asarray(z, dtype=float)
        return z - np.round(self.eta * z) / self.eta

    def boundary_chi_tilde(self, k: int) -> np.ndarray:
        return self.periodic_single_layer @ self.densities[k].values

    def chi_tilde(self, k: int, z) -> np.ndarray:
        return self._evaluator.periodic_single_layer(self.densities[k].values, self.wrap(z), self.green)

    def grad_chi_tilde(self, k: int, z) -> np.ndarray:
        return self._evaluator.grad_periodic_single_layer(
            self.densities[k].values, self.wrap(z), self.green
        )

    def chi(self, k: int, y) -> np.ndarray:
        """χ_{k,η}(y) = η χ̃^η_k(y/η) on the unit torus."""
        return self.eta * self.chi_tilde(k, np.asarray(y, dtype=float) / self.eta)

    def grad_chi(self, k: int, y) -> np.ndarray:
        return self.grad_chi_tilde(k, np.asarray(y, dtype=float) / self.eta)

    def residual(self) -> float:
        """max_k ‖(½I + K^{η,*}_p)φ_{k,η} + N^k‖_∞."""
        lhs = 0.5 * np.eye(self.operator.shape[0]) + self.operator
        return max(
            float(np.max(np.abs(lhs @ d.values - _normal_rhs(self.shape, k))))
            for k, d in enumerate(self.densities)
        )

    def max_mean(self) -> float:
        return max(abs(d.integral) for d in self.densities)


def solve_cell(
    shape: HoleShape,
    eta: float,
    method: str = "direct",
    green: Optional[TorusGreen] = None,
    series_terms: int = 3,
    series_max_eta: float = 0.5,
    max_upsample: int = 64,
) -> CellSolution:
    """
    Solve the rescaled cell problem at scale η.

    Args:
        shape: Model hole T.
        eta: Relative hole size in (0, 1].
        method: ``direct`` (dense LU) or ``series`` (truncated Neumann series).
        green: Torus Green's function evaluator; a default one is built if omitted.
        series_terms: Number of correction terms L for the series method.
        series_max_eta: Largest η accepted by the series method.
        max_upsample: Refinement cap for off-boundary evaluation.

    Raises:
        DomainError: η outside (0, 1].
        SeriesDivergenceError: Series method above its admissible η.
    """
    _check_eta(eta)
    if shape.dim != 2:
        raise UnsupportedError("cell problems are solved in d = 2 only")
    green = green or TorusGreen()
    ge = GreenEta(eta, green)
    operator = assemble_periodic(shape, ge, OperatorKind.KSTARP_ETA).matrix
    sp = assemble_periodic(shape, ge, OperatorKind.SP_ETA).matrix

    if method == "direct":
        system = DenseSystem(0.5 * np.eye(operator.shape[0]) + operator, "½I + K*_p")
        values = [system.solve(_normal_rhs(shape, k)) for k in range(2)]
        label = "direct"
    elif method == "series":
        if eta > series_max_eta:
            raise SeriesDivergenceError(
                f"η above Neumann-series radius: η = {eta:g} > {series_max_eta:g}"
            )
        series = NeumannSeries(shape, ge)
        values = [series.inverse(_normal_rhs(shape, k), series_terms) for k in range(2)]
        label = f"series({series_terms})"
    else:
        raise DomainError(f"unknown solver method {method!r}")

    sol = CellSolution(
        shape=shape,
        eta=eta,
        densities=tuple(BoundaryDensity(shape, v) for v in values),
        method=label,
        green=ge,
        operator=operator,
        periodic_single_layer=sp,
        max_upsample=max_upsample,
    )
    logger.debug(
        f"Cell problem η={eta:g} ({label}) on {shape.label}: residual {sol.residual():.2e}"
    )
    return sol


def chi_expansion_gap(
    shape: HoleShape,
    eta: float,
    green: Optional[TorusGreen] = None,
    exterior: Optional[ExteriorSolution] = None,
    cell: Optional[CellSolution] = None,
    leading: bool = False,
) -> float:
    """
    sup over ∂T of |χ̃^η_k − w⁰_k − η^d (Q1 − S(½I + K*)^{−1}Q2)[φ⁰_k]|, max over k.

    With ``leading=True`` only |χ̃^η_k − w⁰_k| is measured.
    """
    _check_eta(eta)
    exterior = exterior or solve_exterior(shape)
    cell = cell or solve_cell(shape, eta, green=green)
    d = 2
    q1 = assemble_q(shape, OperatorKind.Q1, d).matrix
    q2 = assemble_q(shape, OperatorKind.Q2, d).matrix
    gap = 0.0
    for k in range(d):
        phi0 = exterior.densities[k].values
        diff = cell.boundary_chi_tilde(k) - exterior.boundary_w(k)
        if not leading:
            correction = q1 @ phi0 - exterior.single_layer @ exterior.system.solve(q2 @ phi0)
            diff = diff - eta**d * correction
        gap = max(gap, float(np.max(np.abs(diff))))
    return gap
