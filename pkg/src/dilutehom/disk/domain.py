"""
Perforated disk Ω^ε = Ω ∖ ∪_k ε(k + ηT̄) with only interior holes retained.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Mapping, Optional

import numpy as np

from ..core.errors import DomainError, UnsupportedError
from ..geometry.curves import HoleShape, make_circle
from .polynomials import Polynomial2D


logger = logging.getLogger("dilutehom.disk")


def hole_centers(outer_radius: float, epsilon: float, eta: float) -> np.ndarray:
    """
    Lattice points εk with ε(k + B_{2η}) ⊂ Ω, i.e. |εk| + 2εη < outer_radius.

    Returns:
        (m, 2) array ordered by (k₁, k₂).
    """
    n = int(np.ceil(outer_radius / epsilon))
    k = np.arange(-n, n + 1)
    kk = np.stack(np.meshgrid(k, k, indexing="ij"), axis=-1).reshape(-1, 2)
    centers = epsilon * kk.astype(float)
    keep = np.hypot(centers[:, 0], centers[:, 1]) + 2.0 * epsilon * eta < outer_radius
    return centers[keep]


@dataclass(eq=False)
class PerforatedDiskProblem:
    """−Δu^ε = f in Ω^ε, u^ε = g on ∂Ω, ∂u^ε/∂N = 0 on the hole boundaries."""
    outer_radius: float
    epsilon: float
    eta: float
    shape: HoleShape
    f: Polynomial2D = field(default_factory=lambda: Polynomial2D.constant(0.0))
    g: Polynomial2D = field(default_factory=lambda: Polynomial2D.constant(0.0))
    centers: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)), repr=False)
    boundary_nodes: int = 256
    hole_nodes: int = 32

    @property
    def n_holes(self) -> int:
        return int(self.centers.shape[0])

    @property
    def hole_scale(self) -> float:
        return self.epsilon * self.eta

    @cached_property
    def model_hole(self) -> HoleShape:
        """εηT on ``hole_nodes`` nodes per component, centred at the origin."""
        return self.shape.with_nodes(self.hole_nodes).scaled(self.hole_scale)

    @cached_property
    def hole_reach(self) -> float:
        """Largest |x| over the scaled model hole."""
        p = self.model_hole.points
        return float(np.max(np.hypot(p[:, 0], p[:, 1])))

    def holes(self) -> List[HoleShape]:
        return [self.model_hole.translated(c) for c in self.centers]

    def min_boundary_gap(self) -> float:
        """Distance from the outermost hole to ∂Ω; the radius when no hole is kept."""
        if not self.n_holes:
            return self.outer_radius
        reach = np.hypot(self.centers[:, 0], self.centers[:, 1]) + self.hole_reach
        return float(self.outer_radius - reach.max())

    def outer_boundary(self, n_nodes: Optional[int] = None) -> HoleShape:
        curve = make_circle(self.outer_radius, n_nodes=n_nodes or self.boundary_nodes, contained=False)
        return HoleShape(components=(curve,), label=f"disk:{self.outer_radius:g}", cell_scale=False)

    def with_data(self, f: Polynomial2D, g: Polynomial2D) -> "PerforatedDiskProblem":
        return PerforatedDiskProblem(
            self.outer_radius, self.epsilon, self.eta, self.shape, f, g,
            self.centers, self.boundary_nodes, self.hole_nodes,
        )

    def without_holes(self) -> "PerforatedDiskProblem":
        return PerforatedDiskProblem(
            self.outer_radius, self.epsilon, self.eta, self.shape, self.f, self.g,
            np.zeros((0, 2)), self.boundary_nodes, self.hole_nodes,
        )


def build_domain(
    outer_radius: float,
    epsilon: float,
    eta: float,
    shape: HoleShape,
    f: Optional[Mapping[str, float]] = None,
    g: Optional[Mapping[str, float]] = None,
    boundary_nodes: int = 256,
    hole_nodes: int = 32,
) -> PerforatedDiskProblem:
    """
    Retain the interior holes of the ε-lattice inside the disk of ``outer_radius``.

    Holes that would meet ∂Ω are dropped rather than enlarged, so the outer
    boundary stays the exact circle.

    Raises:
        DomainError: ε outside (0, outer_radius) or η outside (0, 1].
        UnsupportedError: d = 3 shapes.
    """
    if outer_radius <= 0:
        raise DomainError(f"outer radius must be positive, got {outer_radius}")
    if not 0.0 < epsilon < outer_radius:
        raise DomainError(f"epsilon must be in (0,{outer_radius:g}), got {epsilon}")
    if not 0.0 < eta <= 1.0:
        raise DomainError(f"eta must be in (0,1], got {eta}")
    if shape.dim != 2:
        raise UnsupportedError("the perforated disk is two-dimensional")

    centers = hole_centers(outer_radius, epsilon, eta)
    if centers.shape[0] == 0:
        logger.warning(
            f"No interior hole at epsilon={epsilon:g}, eta={eta:g}: solving the unperforated disk"
        )
    problem = PerforatedDiskProblem(
        outer_radius=float(outer_radius),
        epsilon=float(epsilon),
        eta=float(eta),
        shape=shape,
        f=f if isinstance(f, Polynomial2D) else Polynomial2D.from_terms(f or {}),
        g=g if isinstance(g, Polynomial2D) else Polynomial2D.from_terms(g or {}),
        centers=centers,
        boundary_nodes=int(boundary_nodes),
        hole_nodes=int(hole_nodes),
    )
    logger.info(f"Perforated disk: {problem.n_holes} holes at epsilon={epsilon:g}, eta={eta:g}")
    return problem
