"""
Effective tensor Ā(η), polarization tensor M and the dilute expansion.

Boundary forms are primary:

    M_ik = ∫_{∂T} N^i w⁰_k ds
    ā_ij = δ_ij − η^d / (1 − η^d|T|) ∫_{∂T} N^i χ̃^η_j ds

Volume forms are provided as cross-checks.
"""

import logging
from typing import Optional, Sequence

import numpy as np
from scipy.special import gamma

from ..cell.diagnostics import cell_rules
from ..cell.solver import CellSolution, ExteriorSolution, solve_exterior
from ..core.errors import DomainError
from ..core.results import EffectiveTensor, PolarizationTensor
from ..geometry.curves import HoleShape, boundary_integral
from ..geometry.quadrature import annulus_quadrature


logger = logging.getLogger("dilutehom.homogenization")


def volume_fraction(shape: HoleShape, eta: float) -> float:
    """Hole volume fraction η^d|T| of the unit cell."""
    return float(eta**shape.dim * shape.area)


def polarization(ext: ExteriorSolution) -> PolarizationTensor:
    """M_ik = ∫_{∂T} N^i w⁰_k ds by boundary quadrature."""
    shape = ext.shape
    d = ext.dim
    matrix = np.empty((d, d))
    for k in range(d):
        wk = ext.boundary_w(k)
        for i in range(d):
            matrix[i, k] = boundary_integral(shape, shape.normals[:, i] * wk)
    return PolarizationTensor(matrix, shape.label, shape.n_nodes)


def polarization_sphere(radius: float, dim: int = 3) -> PolarizationTensor:
    """Ball of radius a: M = |∂B₁| a^d / (d(d − 1)) · I."""
    if radius <= 0:
        raise DomainError(f"sphere radius must be positive, got {radius}")
    surface = 2.0 * np.pi ** (dim / 2.0) / float(gamma(dim / 2.0))
    value = surface * radius**dim / (dim * (dim - 1))
    return PolarizationTensor(value * np.eye(dim), f"sphere:{radius:g}")


def polarization_for(shape: HoleShape) -> PolarizationTensor:
    if shape.dim == 3:
        return polarization_sphere(shape.sphere_radius)
    return polarization(solve_exterior(shape))


def polarization_volume(ext: ExteriorSolution, outer_radius: Optional[float] = None) -> PolarizationTensor:
    """
    M_ij = ∫_{R²∖T} ∇w⁰_i·∇w⁰_j over a truncated annulus plus the dipole tail.

    The far field of w⁰_k is c_k·x/|x|² with c_k = −(1/2π)∫ y φ⁰_k ds; its tail
    contributes π c_i·c_j / R².
    """
    shape = ext.shape
    radius = outer_radius or 10.0 * shape.diameter
    rule = annulus_quadrature(shape.radial_function, radius)
    grads = [ext.grad_w(k, rule.points) for k in range(ext.dim)]
    dipoles = [
        -np.array([boundary_integral(shape, shape.points[:, j] * d.values) for j in range(2)]) / (2.0 * np.pi)
        for d in ext.densities
    ]
    matrix = np.empty((ext.dim, ext.dim))
    for i in range(ext.dim):
        for j in range(ext.dim):
            volume = rule.integrate(np.sum(grads[i] * grads[j], axis=1))
            matrix[i, j] = volume + np.pi * float(np.dot(dipoles[i], dipoles[j])) / radius**2
    return PolarizationTensor(matrix, shape.label, shape.n_nodes)


def _denominator(shape: HoleShape, eta: float) -> float:
    fraction = volume_fraction(shape, eta)
    if fraction >= 1.0:
        raise DomainError(f"η^d|T| = {fraction:.6g} >= 1: the hole fills the cell")
    return 1.0 - fraction


def effective(sol: CellSolution) -> EffectiveTensor:
    """Boundary-form Ā(η); no symmetrization is applied."""
    shape = sol.shape
    d = sol.dim
    factor = sol.eta**d / _denominator(shape, sol.eta)
    matrix = np.eye(d)
    for j in range(d):
        chi_j = sol.boundary_chi_tilde(j)
        for i in range(d):
            matrix[i, j] -= factor * boundary_integral(shape, shape.normals[:, i] * chi_j)
    logger.debug(f"Ā({sol.eta:g}) on {shape.label}: {matrix.tolist()}")
    return EffectiveTensor(
        eta=sol.eta,
        matrix=matrix,
        shape_label=shape.label,
        n_nodes=shape.n_nodes,
        method=sol.method,
        volume_fraction=volume_fraction(shape, sol.eta),
    )


def effective_volume(sol: CellSolution) -> EffectiveTensor:
    """Volume-form Ā(η): fluid average of δ_ij + ∂_iχ_j."""
    shape = sol.shape
    d = sol.dim
    _, fluid = cell_rules(sol)
    factor = sol.eta**d / _denominator(shape, sol.eta)
    matrix = np.eye(d)
    for j in range(d):
        grad = sol.grad_chi_tilde(j, fluid.points)
        for i in range(d):
            matrix[i, j] += factor * fluid.integrate(grad[:, i])
    return EffectiveTensor(sol.eta, matrix, shape.label, shape.n_nodes, "volume", volume_fraction(shape, sol.eta))


def effective_sphere(radius: float, eta: float) -> EffectiveTensor:
    """Leading-order d = 3 tensor I − η³M for a ball."""
    if not 0.0 < eta <= 1.0:
        raise DomainError(f"eta must be in (0,1], got {eta}")
    m = polarization_sphere(radius).matrix
    return EffectiveTensor(
        eta=eta,
        matrix=np.eye(3) - eta**3 * m,
        shape_label=f"sphere:{radius:g}",
        n_nodes=0,
        method="analytic",
        volume_fraction=eta**3 * 4.0 * np.pi * radius**3 / 3.0,
    )


def expansion_residual(tensor: EffectiveTensor, m: np.ndarray) -> float:
    """‖Ā(η) − (I − η^d M)‖_max."""
    d = tensor.dim
    return float(np.max(np.abs(tensor.matrix - (np.eye(d) - tensor.eta**d * m))))


def second_order_coefficient(tensors: Sequence[EffectiveTensor], m: np.ndarray) -> float:
    """Least-squares c with ā₁₁ − (1 − η^d M₁₁) ≈ c η^{2d}; reported, not asserted."""
    d = tensors[0].dim
    x = np.array([t.eta ** (2 * d) for t in tensors])
    y = np.array([t.matrix[0, 0] - (1.0 - t.eta**d * m[0, 0]) for t in tensors])
    return float(np.dot(x, y) / np.dot(x, x))


