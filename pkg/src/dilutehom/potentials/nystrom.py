"""
Nyström discretization of layer-potential operators on a hole boundary.

Kernels use Γ(x) = (1/2π) log|x| and normals pointing out of the hole:

    S[φ](x)  = ∫ Γ(x − y) φ(y) ds_y
    K[φ](x)  = ∫ N_y·(y − x) / (2π|x − y|²) φ(y) ds_y
    K*[φ](x) = ∫ N_x·(x − y) / (2π|x − y|²) φ(y) ds_y

The periodic operators add the smooth part G^η − Γ of the rescaled torus
Green's function, evaluated at the same nodes.
"""

import logging
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
import scipy.linalg

from ..core.errors import DomainError, SolverError, UnsupportedError
from ..geometry.curves import ClosedCurve, HoleShape, boundary_integral
from ..green.torus import GreenEta


logger = logging.getLogger("dilutehom.potentials")


class OperatorKind(Enum):
    """Operator kinds understood by the assembly routines."""
    S = "S"
    D = "D"
    K = "K"
    KSTAR = "Kstar"
    SP_ETA = "Sp_eta"
    KSTARP_ETA = "Kstarp_eta"
    DP_ETA = "Dp_eta"
    R1 = "R1"
    R2 = "R2"
    Q1 = "Q1"
    Q2 = "Q2"

    def __str__(self) -> str:
        return self.value


FREE_KINDS = (OperatorKind.S, OperatorKind.D, OperatorKind.K, OperatorKind.KSTAR)
PERIODIC_KINDS = (
    OperatorKind.SP_ETA,
    OperatorKind.KSTARP_ETA,
    OperatorKind.DP_ETA,
    OperatorKind.R1,
    OperatorKind.R2,
)


@dataclass(frozen=True, eq=False)
class BoundaryDensity:
    """Scalar field on the quadrature nodes of a hole boundary."""
    shape: HoleShape
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.shape.n_nodes,):
            raise DomainError(
                f"density needs {self.shape.n_nodes} values, got shape {values.shape}"
            )
        object.__setattr__(self, "values", values)

    @property
    def integral(self) -> float:
        return boundary_integral(self.shape, self.values)

    @property
    def mean(self) -> float:
        return self.integral / self.shape.perimeter

    def sup_distance(self, other: "BoundaryDensity") -> float:
        return float(np.max(np.abs(self.values - other.values)))


@dataclass(frozen=True, eq=False)
class NystromOperator:
    """Dense on-boundary operator matrix."""
    matrix: np.ndarray
    kind: OperatorKind
    eta: Optional[float] = None

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def apply(self, density) -> np.ndarray:
        values = density.values if isinstance(density, BoundaryDensity) else density
        return self.matrix @ np.asarray(values, dtype=float)

    def dump_csv(self, path: str) -> None:
        """Debug dump of the matrix in full precision."""
        np.savetxt(path, self.matrix, fmt="%.17g", delimiter=",")


def kress_log_weights(n: int) -> np.ndarray:
    """
    Circulant weights R with Σ_j R[i, j] f(t_j) ≈ ∫₀^{2π} log(4 sin²((t_i − τ)/2)) f(τ) dτ.
    """
    tau = 2.0 * np.pi * np.arange(n) / n
    m = np.arange(1, n // 2)
    column = -(4.0 * np.pi / n) * (np.cos(np.outer(tau, m)) / m).sum(axis=1)
    column -= (4.0 * np.pi / n**2) * np.cos(n * tau / 2.0)
    return scipy.linalg.circulant(column)


def _pair_geometry(shape: HoleShape):
    diff = shape.points[:, None, :] - shape.points[None, :, :]
    r2 = np.sum(diff * diff, axis=2)
    np.fill_diagonal(r2, 1.0)
    return diff, r2


def _single_layer_block(curve: ClosedCurve) -> np.ndarray:
    n = curve.n_nodes
    t = curve.params
    diff = curve.points[:, None, :] - curve.points[None, :, :]
    dist = np.linalg.norm(diff, axis=2)
    sin2 = 4.0 * np.sin((t[:, None] - t[None, :]) / 2.0) ** 2
    np.fill_diagonal(dist, 1.0)
    np.fill_diagonal(sin2, 1.0)
    smooth = np.log(dist) - 0.5 * np.log(sin2)
    np.fill_diagonal(smooth, np.log(curve.speeds))
    kernel = 0.5 * kress_log_weights(n) + (2.0 * np.pi / n) * smooth
    return kernel * curve.speeds[None, :] / (2.0 * np.pi)


def single_layer_matrix(shape: HoleShape) -> np.ndarray:
    """S with product-rule quadrature on each component, trapezoid across components."""
    diff, r2 = _pair_geometry(shape)
    matrix = np.log(r2) / (4.0 * np.pi) * shape.weights[None, :]
    for sl, curve in zip(shape.slices, shape.components):
        matrix[sl, sl] = _single_layer_block(curve)
    return matrix


def double_layer_matrix(shape: HoleShape) -> np.ndarray:
    """Principal-value K; diagonal from the curvature limit κ/(4π)."""
    diff, r2 = _pair_geometry(shape)
    # diff = x_i - y_j, so N_y·(y - x) = -N_j·diff
    kernel = -np.einsum("jd,ijd->ij", shape.normals, diff) / (2.0 * np.pi * r2)
    np.fill_diagonal(kernel, shape.curvature / (4.0 * np.pi))
    return kernel * shape.weights[None, :]


def adjoint_double_layer_matrix(shape: HoleShape) -> np.ndarray:
    diff, r2 = _pair_geometry(shape)
    kernel = np.einsum("id,ijd->ij", shape.normals, diff) / (2.0 * np.pi * r2)
    np.fill_diagonal(kernel, shape.curvature / (4.0 * np.pi))
    return kernel * shape.weights[None, :]


def _require_planar(shape: HoleShape) -> None:
    if shape.dim != 2:
        raise UnsupportedError("boundary integral operators are assembled in d = 2 only")


def assemble_free(shape: HoleShape, kind: OperatorKind) -> NystromOperator:
    """
    Assemble a free-space on-boundary operator.

    On the boundary the double layer D is represented by its principal value K.
    """
    _require_planar(shape)
    kind = OperatorKind(kind)
    if kind is OperatorKind.S:
        matrix = single_layer_matrix(shape)
    elif kind in (OperatorKind.D, OperatorKind.K):
        matrix = double_layer_matrix(shape)
    elif kind is OperatorKind.KSTAR:
        matrix = adjoint_double_layer_matrix(shape)
    else:
        raise UnsupportedError(f"{kind} is not a free-space operator")
    logger.debug(f"Assembled {kind} on {shape.n_nodes} nodes")
    return NystromOperator(matrix, kind)


def assemble_periodic(shape: HoleShape, green: GreenEta, kind: OperatorKind) -> NystromOperator:
    """
    Assemble a periodic operator on the rescaled torus (1/η)T².

    SP_ETA = S + (G^η − Γ); KSTARP_ETA = K* + η^{d−1} R2; DP_ETA = K + the
    matching smooth double-layer correction. R1 and R2 are the smooth
    corrections alone, normalized by η^{d−2} and η^{d−1}.
    """
    _require_planar(shape)
    kind = OperatorKind(kind)
    if kind not in PERIODIC_KINDS:
        raise UnsupportedError(f"{kind} is not a periodic operator")
    eta = green.eta
    d = green.dim
    diff = shape.points[:, None, :] - shape.points[None, :, :]
    w = shape.weights[None, :]

    if kind in (OperatorKind.SP_ETA, OperatorKind.R1):
        smooth = green.perturbation(diff) * w
        if kind is OperatorKind.R1:
            matrix = smooth / eta ** (d - 2)
        else:
            matrix = single_layer_matrix(shape) + smooth
    else:
        grad = green.grad_perturbation(diff)
        if kind is OperatorKind.DP_ETA:
            # ∂_{N_y} of the smooth part at x - y, using oddness of the gradient
            matrix = double_layer_matrix(shape) - np.einsum("jd,ijd->ij", shape.normals, grad) * w
        else:
            smooth = np.einsum("id,ijd->ij", shape.normals, grad) * w
            if kind is OperatorKind.R2:
                matrix = smooth / eta ** (d - 1)
            else:
                matrix = adjoint_double_layer_matrix(shape) + smooth
    logger.debug(f"Assembled {kind} at η = {eta:g} on {shape.n_nodes} nodes")
    return NystromOperator(matrix, kind, eta)


def assemble_q(shape: HoleShape, kind: OperatorKind, dim: int = 2) -> NystromOperator:
    """Quadratic-kernel operators Q1 (−|x − y|²/(2d)) and Q2 (its N_x derivative)."""
    _require_planar(shape)
    kind = OperatorKind(kind)
    diff = shape.points[:, None, :] - shape.points[None, :, :]
    w = shape.weights[None, :]
    if kind is OperatorKind.Q1:
        matrix = -np.sum(diff * diff, axis=2) / (2.0 * dim) * w
    elif kind is OperatorKind.Q2:
        matrix = -np.einsum("id,ijd->ij", shape.normals, diff) / dim * w
    else:
        raise UnsupportedError(f"{kind} is not a quadratic-kernel operator")
    return NystromOperator(matrix, kind)


def condition_estimate(matrix: np.ndarray) -> float:
    try:
        return float(np.linalg.cond(matrix, 1))
    except np.linalg.LinAlgError:
        return float("inf")


class DenseSystem:
    """LU-factored dense system reused across right-hand sides."""

    def __init__(self, matrix: np.ndarray, label: str = "system"):
        self.matrix = np.asarray(matrix, dtype=float)
        self.label = label
        with warnings.catch_warnings():
            warnings.simplefilter("error", scipy.linalg.LinAlgWarning)
            try:
                self._lu = scipy.linalg.lu_factor(self.matrix, check_finite=True)
            except (ValueError, scipy.linalg.LinAlgWarning, np.linalg.LinAlgError) as e:
                raise SolverError(
                    f"{label}: factorization failed ({e})", condition_estimate(self.matrix)
                ) from e
        logger.debug(f"Factorized {label} ({self.matrix.shape[0]} unknowns)")

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        x = scipy.linalg.lu_solve(self._lu, np.asarray(rhs, dtype=float))
        if not np.all(np.isfinite(x)):
            raise SolverError(
                f"{self.label}: non-finite solution", condition_estimate(self.matrix)
            )
        return x

    def residual(self, x: np.ndarray, rhs: np.ndarray) -> float:
        return float(np.max(np.abs(self.matrix @ x - rhs)))


def second_kind(operator: NystromOperator) -> np.ndarray:
    """½I + operator."""
    return 0.5 * np.eye(operator.n) + operator.matrix
