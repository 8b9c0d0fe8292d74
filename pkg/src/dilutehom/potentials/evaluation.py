"""
Off-boundary evaluation of single- and double-layer potentials.

Derivatives use the complex (Cauchy) form of the kernels. With z = x₁ + ix₂,
ζ the source point and dζ = τ ds:

    S_x − i S_y   = (1/2π) ∫ φ / (z − ζ) ds
    D + i D~      = (1/2πi) ∮ ψ / (ζ − z) dζ,   D_x − i D_y = (1/2πi) ∮ ψ / (ζ − z)² dζ

Targets closer to a component than ``guard`` node spacings are handled by
spectral upsampling of that component and of the density.
"""

import logging
import warnings
from typing import Dict, Tuple

import numpy as np
import scipy.signal

from ..core.errors import AccuracyWarning, DomainError
from ..geometry.curves import ClosedCurve, HoleShape
from ..green.torus import GreenEta


logger = logging.getLogger("dilutehom.potentials")

TWO_PI = 2.0 * np.pi
CHUNK = 512


def _complex(points: np.ndarray) -> np.ndarray:
    return points[..., 0] + 1j * points[..., 1]


def _as_targets(targets) -> Tuple[np.ndarray, Tuple[int, ...]]:
    arr = np.asarray(targets, dtype=float)
    if arr.shape[-1] != 2:
        raise DomainError(f"targets need 2 coordinates, got shape {arr.shape}")
    return arr.reshape(-1, 2), arr.shape[:-1]


def _from_complex(f: np.ndarray, order: int) -> np.ndarray:
    """Convert u_x − i u_y (order 1) or u_xx − i u_xy (order 2) to real arrays."""
    if order == 1:
        return np.stack([f.real, -f.imag], axis=-1)
    hxx, hxy = f.real, -f.imag
    return np.stack([np.stack([hxx, hxy], -1), np.stack([hxy, -hxx], -1)], -2)


def layer_sums(kind: str, order: int, src, values: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Plain quadrature of a layer potential of kind 'S' or 'D' at complex targets z."""
    zeta = _complex(src.points)
    w = src.weights * values
    out = []
    for start in range(0, z.shape[0], CHUNK):
        zc = z[start:start + CHUNK, None]
        delta = zeta[None, :] - zc
        if kind == "S":
            if order == 0:
                out.append(np.log(np.abs(delta)) @ w / TWO_PI)
            elif order == 1:
                out.append(-(1.0 / delta) @ w / TWO_PI)
            else:
                out.append(-(1.0 / delta**2) @ w / TWO_PI)
        else:
            tau = _complex(src.tangents) * w
            coeff = tau / (TWO_PI * 1j)
            if order == 0:
                out.append(((1.0 / delta) @ coeff).real)
            elif order == 1:
                out.append((1.0 / delta**2) @ coeff)
            else:
                out.append(2.0 * (1.0 / delta**3) @ coeff)
    f = np.concatenate(out) if out else np.zeros(0)
    return f if order == 0 else _from_complex(f, order)


def layer_matrix(kind: str, src, targets: np.ndarray, order: int = 0) -> np.ndarray:
    """
    Dense plain-quadrature matrix of a layer potential from ``src`` nodes to targets.

    Returns:
        (m, n) for values, (m, n, 2) for gradients.
    """
    z = _complex(np.asarray(targets, dtype=float))[:, None]
    zeta = _complex(src.points)[None, :]
    delta = zeta - z
    w = src.weights[None, :]
    if kind == "S":
        if order == 0:
            return np.log(np.abs(delta)) * w / TWO_PI
        f = -w / (TWO_PI * delta)
    elif kind == "D":
        coeff = _complex(src.tangents)[None, :] * w / (TWO_PI * 1j)
        if order == 0:
            return (coeff / delta).real
        f = coeff / delta**2
    else:
        raise DomainError(f"unknown layer kind {kind!r}")
    return np.stack([f.real, -f.imag], axis=-1)


class BoundaryEvaluator:
    """
    Guarded evaluator of S and D potentials of a HoleShape at off-boundary points.

    Args:
        shape: Source boundary.
        max_upsample: Largest power-of-two refinement applied per component.
        guard: Required distance in units of the (refined) node spacing.
    """

    def __init__(self, shape: HoleShape, max_upsample: int = 64, guard: float = 3.0):
        self.shape = shape
        self.max_upsample = int(max_upsample)
        self.guard = float(guard)
        self._fine: Dict[Tuple[int, int], ClosedCurve] = {}

    def _refined(self, index: int, factor: int) -> ClosedCurve:
        key = (index, factor)
        if key not in self._fine:
            curve = self.shape.components[index]
            self._fine[key] = curve if factor == 1 else curve.resampled(curve.n_nodes * factor)
        return self._fine[key]

    def upsample_factors(self, index: int, pts: np.ndarray) -> np.ndarray:
        """Per-target refinement factor for one component."""
        curve = self.shape.components[index]
        h = curve.node_spacing
        dist = np.empty(pts.shape[0])
        for start in range(0, pts.shape[0], CHUNK):
            chunk = pts[start:start + CHUNK]
            dist[start:start + CHUNK] = np.min(
                np.linalg.norm(chunk[:, None, :] - curve.points[None, :, :], axis=2), axis=1
            )
        need = self.guard * h / np.maximum(dist, 1e-300)
        factors = np.ones(pts.shape[0], dtype=int)
        close = need > 1.0
        factors[close] = 2 ** np.ceil(np.log2(np.minimum(need[close], 2.0**40))).astype(int)
        too_close = factors > self.max_upsample
        if np.any(too_close):
            closest = float(np.min(dist[too_close]))
            warnings.warn(
                AccuracyWarning(
                    f"target at distance {closest:.3e} from the boundary is within "
                    f"{self.guard:g} node spacings even after {self.max_upsample}x upsampling",
                    closest,
                ),
                stacklevel=3,
            )
            factors[too_close] = self.max_upsample
        return factors

    def _evaluate(self, kind: str, values, targets, order: int) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        if values.shape != (self.shape.n_nodes,):
            raise DomainError(
                f"density needs {self.shape.n_nodes} values, got shape {values.shape}"
            )
        pts, shape = _as_targets(targets)
        z = _complex(pts)
        tail = () if order == 0 else (2,) * order
        out = np.zeros((pts.shape[0],) + tail)
        for index, sl in enumerate(self.shape.slices):
            factors = self.upsample_factors(index, pts)
            for factor in np.unique(factors):
                mask = factors == factor
                curve = self._refined(index, int(factor))
                dens = values[sl]
                if factor > 1:
                    dens = scipy.signal.resample(dens, curve.n_nodes)
                out[mask] += layer_sums(kind, order, curve, dens, z[mask])
        return out.reshape(shape + tail)

    def single_layer(self, values, targets) -> np.ndarray:
        return self._evaluate("S", values, targets, 0)

    def grad_single_layer(self, values, targets) -> np.ndarray:
        return self._evaluate("S", values, targets, 1)

    def hessian_single_layer(self, values, targets) -> np.ndarray:
        return self._evaluate("S", values, targets, 2)

    def double_layer(self, values, targets) -> np.ndarray:
        return self._evaluate("D", values, targets, 0)

    def grad_double_layer(self, values, targets) -> np.ndarray:
        return self._evaluate("D", values, targets, 1)

    def hessian_double_layer(self, values, targets) -> np.ndarray:
        return self._evaluate("D", values, targets, 2)

    def periodic_single_layer(self, values, targets, green: GreenEta) -> np.ndarray:
        """S^η_p[φ] = S[φ] + Σ (G^η − Γ)(x − y_j) φ_j w_j; the smooth part uses base nodes."""
        pts, shape = _as_targets(targets)
        free = self.single_layer(values, pts)
        w = self.shape.weights * np.asarray(values, dtype=float)
        smooth = np.concatenate([
            green.perturbation(pts[s:s + CHUNK, None, :] - self.shape.points[None, :, :]) @ w
            for s in range(0, pts.shape[0], CHUNK)
        ])
        return (free + smooth).reshape(shape)

    def grad_periodic_single_layer(self, values, targets, green: GreenEta) -> np.ndarray:
        pts, shape = _as_targets(targets)
        free = self.grad_single_layer(values, pts)
        w = self.shape.weights * np.asarray(values, dtype=float)
        smooth = np.concatenate([
            np.einsum(
                "mjd,j->md",
                green.grad_perturbation(pts[s:s + CHUNK, None, :] - self.shape.points[None, :, :]),
                w,
            )
            for s in range(0, pts.shape[0], CHUNK)
        ])
        return (free + smooth).reshape(shape + (2,))


def eval_potential(shape: HoleShape, values, kind: str, x, green: GreenEta = None, max_upsample: int = 64):
    """Potential of kind S, D or Sp_eta at off-boundary points."""
    evaluator = BoundaryEvaluator(shape, max_upsample)
    if kind == "S":
        return evaluator.single_layer(values, x)
    if kind == "D":
        return evaluator.double_layer(values, x)
    if kind == "Sp_eta":
        if green is None:
            raise DomainError("Sp_eta evaluation needs a GreenEta")
        return evaluator.periodic_single_layer(values, x, green)
    raise DomainError(f"unknown potential kind {kind!r}")


def eval_grad_potential(shape: HoleShape, values, kind: str, x, green: GreenEta = None, max_upsample: int = 64):
    """Gradient of a potential of kind S, D or Sp_eta at off-boundary points."""
    evaluator = BoundaryEvaluator(shape, max_upsample)
    if kind == "S":
        return evaluator.grad_single_layer(values, x)
    if kind == "D":
        return evaluator.grad_double_layer(values, x)
    if kind == "Sp_eta":
        if green is None:
            raise DomainError("Sp_eta evaluation needs a GreenEta")
        return evaluator.grad_periodic_single_layer(values, x, green)
    raise DomainError(f"unknown potential kind {kind!r}")
