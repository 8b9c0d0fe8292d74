"""
Volume quadrature rules used for cross-checks of boundary formulas.

All rules are polar: Gauss-Legendre in the radius, and in the angle either
Gauss-Legendre panels (square cells, split at the corners) or the periodic
trapezoidal rule (disks and annuli).
"""

from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from ..core.errors import DomainError, UnsupportedError


@dataclass(frozen=True)
class VolumeQuadrature:
    """Nodes and weights of a planar volume rule."""
    points: np.ndarray
    weights: np.ndarray

    @property
    def area(self) -> float:
        return float(np.sum(self.weights))

    def integrate(self, values: np.ndarray) -> float:
        values = np.asarray(values, dtype=float)
        if values.shape[0] != self.weights.shape[0]:
            raise DomainError(
                f"expected {self.weights.shape[0]} values, got {values.shape[0]}"
            )
        return float(np.dot(self.weights, values))

    def __add__(self, other: "VolumeQuadrature") -> "VolumeQuadrature":
        return VolumeQuadrature(
            np.concatenate([self.points, other.points]),
            np.concatenate([self.weights, other.weights]),
        )


@dataclass(frozen=True)
class SampleGrid(VolumeQuadrature):
    """Polar sampling grid on a disk with excluded zones removed."""
    excluded_area: float = 0.0


def _radial_segments(
    theta: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    theta_weights: np.ndarray,
    n_radial: int,
) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre in r on [lower(θ), upper(θ)] for every angular node."""
    x, w = leggauss(n_radial)
    half = 0.5 * (upper - lower)
    mid = 0.5 * (upper + lower)
    r = mid[:, None] + half[:, None] * x[None, :]
    weights = theta_weights[:, None] * half[:, None] * w[None, :] * r
    pts = np.stack([r * np.cos(theta)[:, None], r * np.sin(theta)[:, None]], axis=-1)
    return pts.reshape(-1, 2), weights.reshape(-1)


def _graded_breaks(lower: np.ndarray, upper: np.ndarray, levels: int) -> List[np.ndarray]:
    """Break points between lower and upper, geometrically refined towards lower."""
    span = upper - lower
    fractions = [0.0] + [2.0 ** (k - levels) for k in range(levels)] + [1.0]
    fractions = sorted(set(fractions))
    return [lower + f * span for f in fractions]


def _square_panels(n_per_panel: int) -> Tuple[np.ndarray, np.ndarray]:
    """Angular Gauss-Legendre nodes on the four panels between square corners."""
    x, w = leggauss(n_per_panel)
    thetas, weights = [], []
    for m in range(4):
        a = -np.pi / 4 + m * np.pi / 2
        thetas.append(a + np.pi / 4 * (x + 1.0))
        weights.append(np.pi / 4 * w)
    return np.concatenate(thetas), np.concatenate(weights)


def square_radius(theta: np.ndarray, half_width: float) -> np.ndarray:
    """Distance from the origin to the boundary of [-L, L]^2 along direction θ."""
    return half_width / np.maximum(np.abs(np.cos(theta)), np.abs(np.sin(theta)))


def cell_quadrature(
    radial: Optional[Callable[[np.ndarray], np.ndarray]],
    half_width: float,
    n_angular: int = 48,
    n_radial: int = 24,
    levels: int = 4,
) -> Tuple[VolumeQuadrature, VolumeQuadrature]:
    """
    Quadrature of the square cell [-L, L]^2 split along ∂T.

    Args:
        radial: r(θ) of a hole star-shaped about the origin.
        half_width: L; the rescaled torus (1/η)T^2 has L = 1/(2η).
        n_angular: Gauss-Legendre nodes per angular panel.
        n_radial: Gauss-Legendre nodes per radial segment.
        levels: Number of geometric refinements of the fluid part towards ∂T.

    Returns:
        (hole rule, fluid rule).

    Raises:
        UnsupportedError: The shape has no radial description.
    """
    if radial is None:
        raise UnsupportedError(
            "volume quadrature needs a single component star-shaped about the origin"
        )
    theta, wt = _square_panels(n_angular)
    r_hole = radial(theta)
    r_cell = square_radius(theta, half_width)
    if np.any(r_hole >= r_cell):
        raise DomainError("hole does not fit inside the cell")

    hole = VolumeQuadrature(*_radial_segments(theta, np.zeros_like(r_hole), r_hole, wt, n_radial))

    pts, wts = [], []
    breaks = _graded_breaks(r_hole, r_cell, levels)
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        p, w = _radial_segments(theta, lo, hi, wt, n_radial)
        pts.append(p)
        wts.append(w)
    fluid = VolumeQuadrature(np.concatenate(pts), np.concatenate(wts))
    return hole, fluid


def annulus_quadrature(
    radial: Optional[Callable[[np.ndarray], np.ndarray]],
    outer_radius: float,
    n_angular: int = 128,
    n_radial: int = 24,
    levels: int = 6,
) -> VolumeQuadrature:
    """Quadrature of {x : r_T(θ) < |x| < outer_radius}, graded towards ∂T."""
    if radial is None:
        raise UnsupportedError(
            "volume quadrature needs a single component star-shaped about the origin"
        )
    theta = np.linspace(0.0, 2.0 * np.pi, n_angular, endpoint=False)
    wt = np.full(n_angular, 2.0 * np.pi / n_angular)
    r_hole = radial(theta)
    r_out = np.full(n_angular, float(outer_radius))
    pts, wts = [], []
    breaks = _graded_breaks(r_hole, r_out, levels)
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        p, w = _radial_segments(theta, lo, hi, wt, n_radial)
        pts.append(p)
        wts.append(w)
    return VolumeQuadrature(np.concatenate(pts), np.concatenate(wts))


def disk_sampling_grid(
    outer_radius: float,
    radial_samples: int,
    angular_samples: int,
    exclusions: Sequence[Tuple[Tuple[float, float], float]] = (),
    boundary_annulus: float = 0.0,
) -> SampleGrid:
    """
    Polar sampling grid on the disk |x| < outer_radius - boundary_annulus.

    Args:
        outer_radius: Radius of Ω.
        radial_samples: Gauss-Legendre nodes in r.
        angular_samples: Trapezoidal nodes in θ.
        exclusions: (center, radius) discs removed from the grid.
        boundary_annulus: Width of the band at ∂Ω removed from the grid.

    Raises:
        DomainError: Nothing is left to sample.
    """
    r_max = outer_radius - boundary_annulus
    if r_max <= 0:
        raise DomainError("empty sampling region: boundary annulus covers the disk")
    theta = np.linspace(0.0, 2.0 * np.pi, angular_samples, endpoint=False)
    wt = np.full(angular_samples, 2.0 * np.pi / angular_samples)
    points, weights = _radial_segments(
        theta, np.zeros(angular_samples), np.full(angular_samples, r_max), wt, radial_samples
    )
    keep = np.ones(points.shape[0], dtype=bool)
    if len(exclusions):
        centers = np.array([c for c, _ in exclusions], dtype=float)
        radii = np.array([r for _, r in exclusions], dtype=float)
        for start in range(0, points.shape[0], 2048):
            chunk = points[start:start + 2048]
            d = np.linalg.norm(chunk[:, None, :] - centers[None, :, :], axis=2)
            keep[start:start + 2048] = np.all(d > radii[None, :], axis=1)
    if not np.any(keep):
        raise DomainError("empty sampling region: every sample is excluded")
    excluded = np.pi * outer_radius**2 - float(np.sum(weights[keep]))
    return SampleGrid(points[keep], weights[keep], excluded)
