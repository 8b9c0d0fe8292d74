"""
First-order corrector εχ_{k,η}(x/ε)∂_kū and sampled H¹ discrepancies.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..cell.solver import CellSolution
from ..core.errors import DomainError
from ..geometry.quadrature import SampleGrid, disk_sampling_grid
from .solver import FullSolution, HomogenizedSolution


logger = logging.getLogger("dilutehom.disk")


@dataclass(eq=False)
class CorrectorField:
    """
    z_ε(x) = ε Σ_k (χ_{k,η}(x/ε) + c_k) ∂_kū(x).

    ∇z_ε = Σ_k ∇_yχ_{k,η}(x/ε) ∂_kū + ε Σ_k (χ_{k,η}(x/ε) + c_k) ∇∂_kū.
    """
    cell: CellSolution
    hom: HomogenizedSolution
    epsilon: float
    shift: Sequence[float] = field(default_factory=lambda: (0.0, 0.0))

    def _cell_coords(self, pts: np.ndarray) -> np.ndarray:
        y = pts / self.epsilon
        return y - np.round(y)

    def value(self, x) -> np.ndarray:
        pts = np.asarray(x, dtype=float).reshape(-1, 2)
        y = self._cell_coords(pts)
        grad_u = self.hom.gradient(pts)
        out = np.zeros(pts.shape[0])
        for k in range(2):
            out += (self.cell.chi(k, y) + self.shift[k]) * grad_u[:, k]
        return self.epsilon * out

    def gradient(self, x) -> np.ndarray:
        pts = np.asarray(x, dtype=float).reshape(-1, 2)
        y = self._cell_coords(pts)
        grad_u = self.hom.gradient(pts)
        hess_u = self.hom.hessian(pts)
        out = np.zeros((pts.shape[0], 2))
        for k in range(2):
            out += self.cell.grad_chi(k, y) * grad_u[:, k, None]
            chi = self.cell.chi(k, y) + self.shift[k]
            out += self.epsilon * chi[:, None] * hess_u[:, k, :]
        return out


def corrector_field(
    cell: CellSolution,
    hom: HomogenizedSolution,
    epsilon: float,
    shift: Optional[Sequence[float]] = None,
) -> CorrectorField:
    """
    Raises:
        DomainError: The cell solution and the disk problem disagree on η.
    """
    if abs(cell.eta - hom.problem.eta) > 1e-14:
        raise DomainError(
            f"cell solution at eta={cell.eta:g} does not match the problem at eta={hom.problem.eta:g}"
        )
    return CorrectorField(cell, hom, float(epsilon), tuple(shift) if shift is not None else (0.0, 0.0))


def sampling_grid(full: FullSolution, radial_samples: int = 48, angular_samples: int = 192) -> SampleGrid:
    """
    Polar grid on Ω minus the holes inflated by the evaluation guard and minus
    the annulus of width 2εη at ∂Ω.
    """
    problem = full.problem
    holes = full.holes
    inflated = holes.reach + holes.guard * holes.model.node_spacing
    exclusions = [((float(c[0]), float(c[1])), inflated) for c in problem.centers]
    return disk_sampling_grid(
        problem.outer_radius,
        radial_samples,
        angular_samples,
        exclusions,
        boundary_annulus=2.0 * problem.epsilon * problem.eta,
    )


def h1_norm(grid: SampleGrid, values: np.ndarray, gradients: np.ndarray) -> float:
    """sqrt(∫v² + ∫|∇v|²) by the grid quadrature."""
    sq = grid.integrate(values**2) + grid.integrate(np.sum(gradients**2, axis=1))
    return float(np.sqrt(max(sq, 0.0)))


@dataclass
class Discrepancy:
    """Sampled H¹ norms on one grid."""
    zeta: float
    uu: float
    u_ubar: float
    corrector: float
    excluded_area: float


def h1_discrepancy(
    full: FullSolution,
    hom: HomogenizedSolution,
    corrector: CorrectorField,
    grid: SampleGrid,
    plain: Optional[HomogenizedSolution] = None,
) -> Discrepancy:
    """
    ‖ζ^ε‖ = ‖u^ε − ū − z_ε‖ and the companions ‖u^ε − u‖, ‖u^ε − ū‖ and ‖z_ε‖.

    ``plain`` is the solution u of the limit problem with Ā = I; when omitted ū is used.
    """
    pts = grid.points
    u_val, u_grad = full.value(pts), full.gradient(pts)
    h_val, h_grad = hom.value(pts), hom.gradient(pts)
    c_val, c_grad = corrector.value(pts), corrector.gradient(pts)
    p_val, p_grad = (plain.value(pts), plain.gradient(pts)) if plain is not None else (h_val, h_grad)
    out = Discrepancy(
        zeta=h1_norm(grid, u_val - h_val - c_val, u_grad - h_grad - c_grad),
        uu=h1_norm(grid, u_val - p_val, u_grad - p_grad),
        u_ubar=h1_norm(grid, u_val - h_val, u_grad - h_grad),
        corrector=h1_norm(grid, c_val, c_grad),
        excluded_area=grid.excluded_area,
    )
    logger.debug(
        f"H1 discrepancy: zeta={out.zeta:.3e}, u-u0={out.uu:.3e}, corrector={out.corrector:.3e}"
    )
    return out


def homogenized_gradient_gap(hom: HomogenizedSolution, plain: HomogenizedSolution, grid: SampleGrid) -> float:
    """Sampled ‖∇(ū^η − u)‖_{L²}."""
    diff = hom.gradient(grid.points) - plain.gradient(grid.points)
    return float(np.sqrt(grid.integrate(np.sum(diff**2, axis=1))))


def homogenized_sup_gap(hom: HomogenizedSolution, plain: HomogenizedSolution, grid: SampleGrid) -> float:
    """Sampled sup |ū^η − u|."""
    return float(np.max(np.abs(hom.value(grid.points) - plain.value(grid.points))))
