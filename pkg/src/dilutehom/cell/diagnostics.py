"""
Norm diagnostics of cell-problem solutions.

Sup norms are sampled; L² norms use the polar cell quadrature and therefore
need a hole with a radial description.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from ..core.errors import UnsupportedError
from ..geometry.curves import HoleShape, boundary_integral
from ..geometry.quadrature import VolumeQuadrature, cell_quadrature
from .solver import CellSolution


logger = logging.getLogger("dilutehom.cell")


@dataclass
class ChiDiagnostics:
    """Norms of χ_{k,η} on the unit torus, maximized over k."""
    eta: float
    sup_chi: float
    sup_grad_chi: float
    l2_chi_torus: float
    l2_grad_chi_torus: float
    l2_grad_chi_tilde: float
    mean_chi_tilde: float

    def to_dict(self) -> Dict[str, float]:
        return dict(self.__dict__)


def outside_hole(shape: HoleShape, points: np.ndarray) -> np.ndarray:
    """True for points outside every component (winding number zero)."""
    z = points[:, 0] + 1j * points[:, 1]
    outside = np.ones(points.shape[0], dtype=bool)
    for curve in shape.components:
        d = curve.z[None, :] - z[:, None]
        turns = np.angle(np.roll(d, -1, axis=1) / d).sum(axis=1)
        outside &= np.abs(turns) < np.pi
    return outside


def sampling_points(sol: CellSolution, grid: int = 64) -> Tuple[np.ndarray, np.ndarray]:
    """Boundary offsets at three node spacings and a grid on the rescaled cell outside T."""
    shape = sol.shape
    offsets = shape.points + 3.0 * shape.node_spacing * shape.normals
    c = ((np.arange(grid) + 0.5) / grid - 0.5) / sol.eta
    xx, yy = np.meshgrid(c, c, indexing="ij")
    pts = np.column_stack([xx.ravel(), yy.ravel()])
    pts = pts[outside_hole(shape, pts)]
    gap = np.min(np.linalg.norm(pts[:, None, :] - shape.points[None, :, :], axis=2), axis=1)
    return offsets, pts[gap >= 3.0 * shape.node_spacing]


def cell_rules(sol: CellSolution, n_angular: int = 24, n_radial: int = 16) -> Tuple[VolumeQuadrature, VolumeQuadrature]:
    radial = sol.shape.radial_function
    if radial is None:
        raise UnsupportedError(
            f"shape {sol.shape.label} has no radial description for volume quadrature"
        )
    return cell_quadrature(radial, sol.half_width, n_angular, n_radial)


def chi_diagnostics(sol: CellSolution, grid: int = 64) -> ChiDiagnostics:
    """Sampled sup norms and torus L² norms of χ_{k,η} and its gradient."""
    eta = sol.eta
    offsets, grid_pts = sampling_points(sol, grid)
    samples = np.concatenate([offsets, grid_pts])

    sup_chi = sup_grad = 0.0
    for k in range(sol.dim):
        values = np.concatenate([sol.boundary_chi_tilde(k), sol.chi_tilde(k, grid_pts)])
        sup_chi = max(sup_chi, eta * float(np.max(np.abs(values))))
        grads = sol.grad_chi_tilde(k, samples)
        sup_grad = max(sup_grad, float(np.max(np.linalg.norm(grads, axis=1))))

    l2_chi = l2_grad = l2_grad_tilde = mean = float("nan")
    try:
        hole, fluid = cell_rules(sol)
    except UnsupportedError as e:
        logger.warning(f"Skipping L² norms: {e}")
    else:
        rule = hole + fluid
        l2_chi = l2_grad = l2_grad_tilde = mean = 0.0
        for k in range(sol.dim):
            chi_t = sol.chi_tilde(k, rule.points)
            grad_t = sol.grad_chi_tilde(k, rule.points)
            sq_chi = rule.integrate(chi_t**2)
            sq_grad = rule.integrate(np.sum(grad_t**2, axis=1))
            # χ(y) = η χ̃(y/η): dy = η^d dz
            l2_chi = max(l2_chi, float(np.sqrt(eta**2 * eta**2 * sq_chi)))
            l2_grad = max(l2_grad, float(np.sqrt(eta**2 * sq_grad)))
            l2_grad_tilde = max(l2_grad_tilde, float(np.sqrt(sq_grad)))
            mean = max(mean, abs(rule.integrate(chi_t)) / rule.area)

    diag = ChiDiagnostics(eta, sup_chi, sup_grad, l2_chi, l2_grad, l2_grad_tilde, mean)
    logger.debug(f"χ diagnostics at η={eta:g}: {diag.to_dict()}")
    return diag


def energy_identity(sol: CellSolution, k: int, rules: Optional[Tuple[VolumeQuadrature, VolumeQuadrature]] = None) -> Tuple[float, float]:
    """
    Both sides of ‖∇χ̃^η_k‖²_{L²(cell∖T)} = ∫_{∂T} N^k χ̃^η_k.

    Returns:
        (volume value, boundary value).
    """
    _, fluid = rules or cell_rules(sol)
    grad = sol.grad_chi_tilde(k, fluid.points)
    volume = fluid.integrate(np.sum(grad**2, axis=1))
    boundary = boundary_integral(sol.shape, sol.shape.normals[:, k] * sol.boundary_chi_tilde(k))
    return float(volume), float(boundary)


def rotation_mismatch(sol: CellSolution, probes: Optional[np.ndarray] = None) -> float:
    """
    max |χ̃²(z) − χ̃¹(Rᵀz)| for the quarter turn R, on the nodes and at probes.

    Only meaningful for shapes invariant under R whose node count is a multiple of 4.
    """
    shape = sol.shape
    if len(shape.components) != 1 or shape.n_nodes % 4:
        raise UnsupportedError("rotation check needs one component with n_nodes divisible by 4")
    quarter = shape.n_nodes // 4
    mismatch = float(np.max(np.abs(sol.boundary_chi_tilde(1) - np.roll(sol.boundary_chi_tilde(0), quarter))))
    if probes is None:
        probes = np.array([[0.6, 0.2], [-0.45, 0.7], [1.1, -0.9], [0.0, 1.3]])
    rot_t = np.array([[0.0, 1.0], [-1.0, 0.0]])
    back = probes @ rot_t.T
    mismatch = max(mismatch, float(np.max(np.abs(sol.chi_tilde(1, probes) - sol.chi_tilde(0, back)))))
    return mismatch
