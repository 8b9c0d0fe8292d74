"""
Dense boundary element solves on the perforated disk.

The full problem is represented as

    u^ε = u_p + D_{∂Ω}[ψ] + Σ_m S_{∂T_m}[φ_m],   −Δu_p = f,

with the coupled second-kind system

    (½I + K_Ω)ψ + Σ_m S_m φ_m            = g − u_p          on ∂Ω
    N·∇D_Ω ψ + (½I + K*_m)φ_m + Σ_{m'≠m} N·∇S_{m'} φ_{m'} = −∂_N u_p   on ∂T_m.

Every hole is a translate of the same scaled model hole, so K*_m is assembled once.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np
import scipy.signal

from ..core.errors import UnsupportedError
from ..core.results import EffectiveTensor
from ..geometry.curves import HoleShape
from ..potentials.evaluation import BoundaryEvaluator, layer_matrix, layer_sums
from ..potentials.nystrom import DenseSystem, adjoint_double_layer_matrix, double_layer_matrix
from .domain import PerforatedDiskProblem
from .polynomials import Polynomial2D


logger = logging.getLogger("dilutehom.disk")

MAX_BOUNDARY_NODES = 4096
# boundary node spacing relative to the hole-to-boundary gap
BOUNDARY_SPACING = 0.25


def boundary_node_count(problem: PerforatedDiskProblem) -> int:
    """Outer node count with spacing ≤ gap/4, rounded up to a power of two and capped."""
    n = problem.boundary_nodes
    if problem.n_holes:
        gap = problem.min_boundary_gap()
        need = 2.0 * np.pi * problem.outer_radius / (BOUNDARY_SPACING * gap)
        n = max(n, int(2 ** np.ceil(np.log2(need))))
    if n > MAX_BOUNDARY_NODES:
        logger.warning(
            f"Boundary needs {n} nodes for the evaluation guard; capping at {MAX_BOUNDARY_NODES}"
        )
        n = MAX_BOUNDARY_NODES
    return n


def _normal_component(grad: np.ndarray, normals: np.ndarray) -> np.ndarray:
    return np.einsum("mnd,md->mn", grad, normals)


@dataclass(eq=False)
class HoleCluster:
    """Nodes of all hole copies c_m + εηT, stacked hole by hole."""
    model: HoleShape
    centers: np.ndarray
    max_upsample: int = 64
    guard: float = 3.0

    @property
    def n_holes(self) -> int:
        return int(self.centers.shape[0])

    @property
    def nodes_per_hole(self) -> int:
        return self.model.n_nodes

    @property
    def n_nodes(self) -> int:
        return self.n_holes * self.nodes_per_hole

    @cached_property
    def points(self) -> np.ndarray:
        return (self.centers[:, None, :] + self.model.points[None, :, :]).reshape(-1, 2)

    @cached_property
    def normals(self) -> np.ndarray:
        return np.tile(self.model.normals, (self.n_holes, 1))

    @cached_property
    def tangents(self) -> np.ndarray:
        return np.tile(self.model.tangents, (self.n_holes, 1))

    @cached_property
    def weights(self) -> np.ndarray:
        return np.tile(self.model.weights, self.n_holes)

    @cached_property
    def evaluator(self) -> BoundaryEvaluator:
        return BoundaryEvaluator(self.model, self.max_upsample, self.guard)

    @cached_property
    def reach(self) -> float:
        p = self.model.points
        return float(np.max(np.hypot(p[:, 0], p[:, 1])))

    def hole_slice(self, m: int) -> slice:
        n = self.nodes_per_hole
        return slice(m * n, (m + 1) * n)

    def single_layer(self, values: np.ndarray, targets: np.ndarray, order: int = 0) -> np.ndarray:
        """Σ_m S_m[φ_m] (order 0) or its gradient (order 1) at off-boundary targets."""
        pts = np.asarray(targets, dtype=float).reshape(-1, 2)
        tail = () if order == 0 else (2,)
        if not self.n_holes:
            return np.zeros((pts.shape[0],) + tail)
        z = pts[:, 0] + 1j * pts[:, 1]
        out = layer_sums("S", order, self, values, z)
        near_radius = self.reach + self.guard * self.model.node_spacing
        for m, center in enumerate(self.centers):
            near = np.hypot(pts[:, 0] - center[0], pts[:, 1] - center[1]) < near_radius
            if not np.any(near):
                continue
            dens = values[self.hole_slice(m)]
            local = pts[near] - center
            plain = layer_sums("S", order, self.model, dens, local[:, 0] + 1j * local[:, 1])
            if order == 0:
                fine = self.evaluator.single_layer(dens, local)
            else:
                fine = self.evaluator.grad_single_layer(dens, local)
            out[near] += fine - plain
        return out


def _odd(values: np.ndarray, n_blocks: int) -> np.ndarray:
    """Trigonometric interpolation of each block to its half-node positions."""
    blocks = np.asarray(values, dtype=float).reshape(n_blocks, -1)
    fine = scipy.signal.resample(blocks, 2 * blocks.shape[1], axis=1)
    return fine[:, 1::2].ravel()


@dataclass(eq=False)
class FullSolution:
    """Densities of the full perforated-disk problem and evaluators of u^ε."""
    problem: PerforatedDiskProblem
    outer: HoleShape
    holes: HoleCluster
    psi: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)
    particular: Polynomial2D
    system: DenseSystem = field(repr=False)
    max_upsample: int = 64

    @cached_property
    def _outer_evaluator(self) -> BoundaryEvaluator:
        return BoundaryEvaluator(self.outer, self.max_upsample)

    @property
    def n_unknowns(self) -> int:
        return int(self.psi.size + self.phi.size)

    def value(self, x) -> np.ndarray:
        """u^ε at points of Ω^ε away from every boundary."""
        pts = np.asarray(x, dtype=float).reshape(-1, 2)
        return (
            self.particular(pts)
            + self._outer_evaluator.double_layer(self.psi, pts)
            + self.holes.single_layer(self.phi, pts)
        )

    def gradient(self, x) -> np.ndarray:
        pts = np.asarray(x, dtype=float).reshape(-1, 2)
        return (
            self.particular.gradient(pts)
            + self._outer_evaluator.grad_double_layer(self.psi, pts)
            + self.holes.single_layer(self.phi, pts, order=1)
        )

    def dirichlet_residual(self) -> float:
        """max |u^ε − g| at the midpoints between the nodes of ∂Ω."""
        outer = self.outer.components[0]
        mid = outer.resampled(2 * outer.n_nodes)
        pts = mid.points[1::2]
        z = pts[:, 0] + 1j * pts[:, 1]
        psi_mid = _odd(self.psi, 1)
        trace = (
            self.particular(pts)
            + 0.5 * psi_mid
            + layer_sums("D", 0, self.outer, self.psi, z)
            + self.holes.single_layer(self.phi, pts)
        )
        return float(np.max(np.abs(trace - self.problem.g(pts))))

    def neumann_residual(self) -> float:
        """max |∂_N u^ε| at the midpoints between the nodes of every hole."""
        if not self.holes.n_holes:
            return 0.0
        n_components = len(self.holes.model.components)
        fine = self.holes.model.resampled(2)
        offsets = fine.points[1::2]
        normals = np.tile(fine.normals[1::2], (self.holes.n_holes, 1))
        pts = (self.holes.centers[:, None, :] + offsets[None, :, :]).reshape(-1, 2)
        z = pts[:, 0] + 1j * pts[:, 1]
        phi_mid = _odd(self.phi, self.holes.n_holes * n_components)
        grad = (
            self.particular.gradient(pts)
            + layer_sums("D", 1, self.outer, self.psi, z)
            + layer_sums("S", 1, self.holes, self.phi, z)
        )
        flux = 0.5 * phi_mid + np.sum(grad * normals, axis=1)
        return float(np.max(np.abs(flux)))

    def residual(self) -> float:
        return max(self.dirichlet_residual(), self.neumann_residual())


def solve_full(problem: PerforatedDiskProblem, max_upsample: int = 64) -> FullSolution:
    """
    Solve the perforated-disk problem by one dense LU solve.

    Raises:
        SolverError: The coupled system could not be factorized.
    """
    n_outer = boundary_node_count(problem)
    outer = problem.outer_boundary(n_outer)
    holes = HoleCluster(problem.model_hole, problem.centers, max_upsample)
    particular = problem.f.particular_solution()

    n_h = holes.n_nodes
    size = n_outer + n_h
    logger.info(
        f"Full problem: {problem.n_holes} holes, {n_outer} boundary nodes, {size} unknowns"
    )
    matrix = np.zeros((size, size))
    matrix[:n_outer, :n_outer] = 0.5 * np.eye(n_outer) + double_layer_matrix(outer)
    rhs = np.empty(size)
    rhs[:n_outer] = problem.g(outer.points) - particular(outer.points)

    if n_h:
        matrix[:n_outer, n_outer:] = layer_matrix("S", holes, outer.points)
        matrix[n_outer:, :n_outer] = _normal_component(
            layer_matrix("D", outer, holes.points, 1), holes.normals
        )
        self_block = 0.5 * np.eye(holes.nodes_per_hole) + adjoint_double_layer_matrix(holes.model)
        for m in range(holes.n_holes):
            rows = holes.hole_slice(m)
            with np.errstate(divide="ignore", invalid="ignore"):
                block = _normal_component(
                    layer_matrix("S", holes, holes.points[rows], 1), holes.normals[rows]
                )
            block[:, rows] = self_block
            matrix[n_outer + rows.start:n_outer + rows.stop, n_outer:] = block
        rhs[n_outer:] = -np.sum(particular.gradient(holes.points) * holes.normals, axis=1)

    system = DenseSystem(matrix, f"perforated disk ({problem.n_holes} holes)")
    x = system.solve(rhs)
    sol = FullSolution(
        problem=problem,
        outer=outer,
        holes=holes,
        psi=x[:n_outer],
        phi=x[n_outer:],
        particular=particular,
        system=system,
        max_upsample=max_upsample,
    )
    logger.debug(f"Full problem solved: boundary residual {sol.residual():.2e}")
    return sol


@dataclass(eq=False)
class HomogenizedSolution:
    """ū solving −ā Δū = f in Ω, ū = g on ∂Ω, as u_p/ā + D[ψ]."""
    problem: PerforatedDiskProblem
    coefficient: float
    outer: HoleShape
    psi: np.ndarray = field(repr=False)
    particular: Polynomial2D
    max_upsample: int = 64

    @cached_property
    def _evaluator(self) -> BoundaryEvaluator:
        return BoundaryEvaluator(self.outer, self.max_upsample)

    def value(self, x) -> np.ndarray:
        pts = np.asarray(x, dtype=float).reshape(-1, 2)
        return self.particular(pts) + self._evaluator.double_layer(self.psi, pts)

    def gradient(self, x) -> np.ndarray:
        pts = np.asarray(x, dtype=float).reshape(-1, 2)
        return self.particular.gradient(pts) + self._evaluator.grad_double_layer(self.psi, pts)

    def hessian(self, x) -> np.ndarray:
        pts = np.asarray(x, dtype=float).reshape(-1, 2)
        return self.particular.hessian(pts) + self._evaluator.hessian_double_layer(self.psi, pts)


def solve_homogenized(
    problem: PerforatedDiskProblem,
    tensor: Optional[EffectiveTensor] = None,
    max_upsample: int = 64,
    tol: float = 1e-6,
) -> HomogenizedSolution:
    """
    Solve the constant-coefficient problem on the unperforated disk.

    ``tensor=None`` stands for Ā = I, i.e. the limit problem without holes.

    Raises:
        UnsupportedError: Ā is not a multiple of the identity.
    """
    tensor = tensor or EffectiveTensor.identity(2)
    if not tensor.is_isotropic(tol):
        raise UnsupportedError(
            f"the disk solver needs an isotropic tensor, got {tensor.matrix.tolist()}"
        )
    a = tensor.scalar
    particular = problem.f.particular_solution() * (1.0 / a)
    outer = problem.outer_boundary()
    system = DenseSystem(0.5 * np.eye(outer.n_nodes) + double_layer_matrix(outer), "½I + K on ∂Ω")
    psi = system.solve(problem.g(outer.points) - particular(outer.points))
    logger.debug(f"Homogenized problem solved with ā = {a:.12g}")
    return HomogenizedSolution(problem, a, outer, psi, particular, max_upsample)
