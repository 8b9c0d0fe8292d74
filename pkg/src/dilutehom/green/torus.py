"""
Periodic Green's function of the Laplacian on the unit torus.

G solves ΔG = δ₀ − 1 with zero mean. It is evaluated by Ewald splitting with
heat-kernel width α = ξ/(4π): a screened real-space lattice sum plus a
Gaussian-damped Fourier sum. R = G − Γ is the smooth part near the origin,
with Γ = (1/2π) log|x| in d = 2 and Γ = −1/(4π|x|) in d = 3.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from scipy import special

from ..core.errors import DomainError, UnsupportedError
from ..core.results import ExpansionFit


logger = logging.getLogger("dilutehom.green")

EULER_GAMMA = float(np.euler_gamma)
FOURIER_PRUNE = 1e-18
# Neutralised simple-cubic lattice constant; R(0) = -XI_CUBIC / (4π) in d = 3.
XI_CUBIC = -2.837297479480620


def r0_closed_form(dim: int = 2) -> float:
    """R(0) in closed form (square lattice: Dedekind eta at i)."""
    if dim == 2:
        eta_i = special.gamma(0.25) / (2.0 * np.pi**0.75)
        return float(np.log(2.0 * np.pi * eta_i**2) / (2.0 * np.pi))
    if dim == 3:
        return float(-XI_CUBIC / (4.0 * np.pi))
    raise UnsupportedError(f"dimension {dim} is not supported")


def fundamental_solution(x: np.ndarray) -> np.ndarray:
    """Γ(x) for points of shape (..., d)."""
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1)
    if x.shape[-1] == 2:
        return np.log(r) / (2.0 * np.pi)
    return -1.0 / (4.0 * np.pi * r)


def grad_fundamental_solution(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    r2 = np.sum(x * x, axis=-1)[..., None]
    if x.shape[-1] == 2:
        return x / (2.0 * np.pi * r2)
    return x / (4.0 * np.pi * r2**1.5)


def _chunked(fn, x: np.ndarray, size: int = 4096) -> np.ndarray:
    if x.shape[0] <= size:
        return fn(x)
    return np.concatenate([fn(x[i:i + size]) for i in range(0, x.shape[0], size)])


def _ein(z: np.ndarray) -> np.ndarray:
    """Entire exponential integral Ein(z) = ∫₀^z (1 − e^{−t})/t dt."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    small = z < 0.5
    zs = z[small]
    term = zs.copy()
    acc = zs.copy()
    for k in range(2, 22):
        term = -term * zs / k
        acc = acc + term / k
    out[small] = acc
    zl = z[~small]
    out[~small] = special.exp1(zl) + EULER_GAMMA + np.log(zl)
    return out


def _ein_slope(z: np.ndarray) -> np.ndarray:
    """Ein'(z) = (1 − e^{−z})/z, finite at 0."""
    z = np.asarray(z, dtype=float)
    out = np.ones_like(z)
    nz = z > 1e-300
    out[nz] = -np.expm1(-z[nz]) / z[nz]
    return out


class TorusGreen:
    """
    Ewald evaluator for G, R = G − Γ and ∇G on the unit torus T^d.

    Args:
        dim: 2 (full support) or 3 (values of R only).
        splitting: Ewald splitting parameter ξ.
        real_shells: Real-space image shells |n|_∞ ≤ real_shells.
        fourier_cutoff: Fourier modes |k|_∞ ≤ fourier_cutoff.
    """

    def __init__(
        self,
        dim: int = 2,
        splitting: float = 1.0,
        real_shells: int = 3,
        fourier_cutoff: int = 20,
    ):
        if dim not in (2, 3):
            raise UnsupportedError(f"torus Green's function supports d = 2, 3; got {dim}")
        if splitting <= 0:
            raise DomainError(f"splitting parameter must be positive, got {splitting}")
        if real_shells < 1 or fourier_cutoff < 1:
            raise DomainError("real_shells and fourier_cutoff must be >= 1")

        self.dim = dim
        self.splitting_parameter = float(splitting)
        self.real_space_cutoff = int(real_shells)
        self.fourier_cutoff = int(fourier_cutoff)
        self.alpha = self.splitting_parameter / (4.0 * np.pi)

        shells = range(-real_shells, real_shells + 1)
        images = np.array(list(itertools.product(shells, repeat=dim)), dtype=float)
        self._images = images[np.any(images != 0, axis=1)]

        modes = range(-fourier_cutoff, fourier_cutoff + 1)
        k = np.array(list(itertools.product(modes, repeat=dim)), dtype=float)
        k = k[np.any(k != 0, axis=1)]
        k2 = np.sum(k * k, axis=1)
        damping = np.exp(-4.0 * np.pi**2 * k2 * self.alpha)
        coeff = damping / (4.0 * np.pi**2 * k2)
        keep = coeff > FOURIER_PRUNE
        self._modes = k[keep]
        self._mode_coeff = coeff[keep]

        self.r0 = float(self._core(np.zeros((1, dim)))[0])
        logger.debug(
            f"TorusGreen d={dim} ξ={splitting}: {len(self._images)} images, "
            f"{len(self._modes)} Fourier modes, R(0) = {self.r0:.15f}"
        )

    @classmethod
    def from_config(cls, green_config) -> "TorusGreen":
        """Build from a ``GreenConfig`` section."""
        return cls(
            splitting=green_config.splitting,
            real_shells=green_config.real_shells,
            fourier_cutoff=green_config.fourier_cutoff,
        )

    def _fourier(self, x: np.ndarray) -> np.ndarray:
        phase = 2.0 * np.pi * (x @ self._modes.T)
        return np.cos(phase) @ self._mode_coeff

    def _core(self, x: np.ndarray) -> np.ndarray:
        """G(x) − Γ(x) from the full lattice sum; valid for x off the nonzero lattice."""
        return _chunked(self._core_block, x)

    def _core_gradient(self, x: np.ndarray) -> np.ndarray:
        return _chunked(self._core_gradient_block, x)

    def _core_block(self, x: np.ndarray) -> np.ndarray:
        a = self.alpha
        r2 = np.sum(x * x, axis=1)
        shifted = x[:, None, :] + self._images[None, :, :]
        if self.dim == 2:
            z = np.sum(shifted**2, axis=2) / (4.0 * a)
            images = special.exp1(z).sum(axis=1) / (4.0 * np.pi)
            self_term = (EULER_GAMMA - np.log(4.0 * a) - _ein(r2 / (4.0 * a))) / (4.0 * np.pi)
            return a + self_term - images - self._fourier(x)

        rho = np.linalg.norm(shifted, axis=2)
        images = (special.erfc(rho / (2.0 * np.sqrt(a))) / (4.0 * np.pi * rho)).sum(axis=1)
        r = np.sqrt(r2)
        self_term = np.empty_like(r)
        nz = r > 1e-12
        self_term[nz] = special.erf(r[nz] / (2.0 * np.sqrt(a))) / (4.0 * np.pi * r[nz])
        self_term[~nz] = 1.0 / (4.0 * np.pi * np.sqrt(np.pi * a))
        return a + self_term - images - self._fourier(x)

    def _core_gradient_block(self, x: np.ndarray) -> np.ndarray:
        if self.dim != 2:
            raise UnsupportedError("gradients of the torus Green's function need d = 2")
        a = self.alpha
        r2 = np.sum(x * x, axis=1)
        grad = -(_ein_slope(r2 / (4.0 * a)) / (8.0 * np.pi * a))[:, None] * x
        shifted = x[:, None, :] + self._images[None, :, :]
        s2 = np.sum(shifted**2, axis=2)
        factor = np.exp(-s2 / (4.0 * a)) / s2
        grad += np.einsum("mi,mid->md", factor, shifted) / (2.0 * np.pi)
        phase = 2.0 * np.pi * (x @ self._modes.T)
        grad += (np.sin(phase) * self._mode_coeff) @ self._modes * (2.0 * np.pi)
        return grad

    @staticmethod
    def _points(x, dim: int) -> Tuple[np.ndarray, Tuple[int, ...]]:
        arr = np.asarray(x, dtype=float)
        if arr.shape[-1] != dim:
            raise DomainError(f"expected points with {dim} coordinates, got shape {arr.shape}")
        return arr.reshape(-1, dim), arr.shape[:-1]

    def regular_part(self, x) -> np.ndarray:
        """G(x) − Γ(x) for max|x_i| < 1, the range met by η(x − y) with x, y ∈ T."""
        pts, shape = self._points(x, self.dim)
        if np.any(np.max(np.abs(pts), axis=1) >= 1.0):
            raise DomainError("regular part requested at |x_i| >= 1")
        return self._core(pts).reshape(shape)

    def grad_regular_part(self, x) -> np.ndarray:
        pts, shape = self._points(x, self.dim)
        if np.any(np.max(np.abs(pts), axis=1) >= 1.0):
            raise DomainError("regular part requested at |x_i| >= 1")
        return self._core_gradient(pts).reshape(shape + (self.dim,))

    def R(self, x) -> np.ndarray:
        """R = G − Γ on the closed cube |x_i| ≤ 1/2."""
        pts, shape = self._points(x, self.dim)
        if np.any(np.abs(pts) > 0.5 + 1e-14):
            raise DomainError(
                "R is only smooth on the closed cube |x_i| <= 1/2; "
                f"got max |x_i| = {np.max(np.abs(pts)):.6g}"
            )
        return self._core(pts).reshape(shape)

    def grad_R(self, x) -> np.ndarray:
        pts, shape = self._points(x, self.dim)
        if np.any(np.abs(pts) > 0.5 + 1e-14):
            raise DomainError("R is only smooth on the closed cube |x_i| <= 1/2")
        return self._core_gradient(pts).reshape(shape + (self.dim,))

    def _wrapped(self, x) -> Tuple[np.ndarray, Tuple[int, ...]]:
        pts, shape = self._points(x, self.dim)
        w = pts - np.round(pts)
        if np.any(np.linalg.norm(w, axis=1) < 1e-14):
            raise DomainError("G is singular at lattice points")
        return w, shape

    def G(self, x) -> np.ndarray:
        w, shape = self._wrapped(x)
        return (fundamental_solution(w) + self._core(w)).reshape(shape)

    def grad_G(self, x) -> np.ndarray:
        w, shape = self._wrapped(x)
        return (grad_fundamental_solution(w) + self._core_gradient(w)).reshape(shape + (self.dim,))

    def mean_value(self, n: int = 64, radius: float = 0.05) -> float:
        """
        Grid estimate of ∫_{T²} G.

        Cells whose centre lies within ``radius`` of the origin are replaced by the
        analytic integral of Γ + R(0) over that ball.
        """
        if self.dim != 2:
            raise UnsupportedError("mean_value is implemented for d = 2")
        c = (np.arange(n) + 0.5) / n - 0.5
        xx, yy = np.meshgrid(c, c, indexing="ij")
        pts = np.column_stack([xx.ravel(), yy.ravel()])
        far = np.linalg.norm(pts, axis=1) >= radius
        total = float(np.sum(self.G(pts[far]))) / n**2
        ball = radius**2 * np.log(radius) / 2.0 - radius**2 / 4.0 + np.pi * radius**2 * self.r0
        return total + ball

    def flux_through_circle(self, radius: float = 0.1, n: int = 256) -> float:
        """∮_{∂B_r} N·∇G ds + |B_r|; equals 1 by ΔG = δ₀ − 1."""
        if self.dim != 2:
            raise UnsupportedError("flux_through_circle is implemented for d = 2")
        t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
        normals = np.column_stack([np.cos(t), np.sin(t)])
        grads = self.grad_G(radius * normals)
        flux = np.sum(np.sum(grads * normals, axis=1)) * radius * 2.0 * np.pi / n
        return float(flux + np.pi * radius**2)

    def table(self, points: Sequence[Sequence[float]]) -> List[Tuple[float, float, float, float]]:
        """Rows (x, y, G, R) for off-lattice points; R is blank outside the cube."""
        rows = []
        for x, y in points:
            g = float(self.G([x, y]))
            r = float(self.regular_part([x, y])) if max(abs(x), abs(y)) <= 0.5 else float("nan")
            rows.append((float(x), float(y), g, r))
        return rows


@dataclass(frozen=True)
class GreenEta:
    """G^η on the rescaled torus (1/η)T^d: G^η(x) = Γ(x) + c_η + η^{d−2} R(ηx)."""
    eta: float
    base: TorusGreen

    def __post_init__(self):
        if not 0.0 < self.eta <= 1.0:
            raise DomainError(f"eta must be in (0,1], got {self.eta}")

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def log_constant(self) -> float:
        """(1/2π) log η in d = 2, zero otherwise."""
        return float(np.log(self.eta) / (2.0 * np.pi)) if self.dim == 2 else 0.0

    def perturbation(self, x) -> np.ndarray:
        """G^η(x) − Γ(x)."""
        x = np.asarray(x, dtype=float)
        scale = self.eta ** (self.dim - 2)
        return self.log_constant + scale * self.base.regular_part(self.eta * x)

    def grad_perturbation(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.eta ** (self.dim - 1) * self.base.grad_regular_part(self.eta * x)

    def G(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.eta ** (self.dim - 2) * self.base.G(self.eta * x)

    def grad_G(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.eta ** (self.dim - 1) * self.base.grad_G(self.eta * x)


def eval_R(g: TorusGreen, x) -> float:
    return float(g.R(x))


def eval_G(g: TorusGreen, x) -> float:
    return float(g.G(x))


def eval_gradG(g: TorusGreen, x) -> np.ndarray:
    return np.asarray(g.grad_G(x))


def mixed_series_G(x, images: int = 8) -> np.ndarray:
    """
    Independent evaluation of G on the unit square torus.

    Exact profile for the k₁ = 0 modes, plus the remaining modes summed in
    closed form over image rows m:
    G = −y²/2 + |y|/2 − 1/12 + (1/2π) Σ_m log|1 − exp(2πi(x + i|y + m|))|.
    """
    pts = np.asarray(x, dtype=float)
    shape = pts.shape[:-1]
    pts = pts.reshape(-1, 2)
    px = pts[:, 0] - np.round(pts[:, 0])
    py = pts[:, 1] - np.round(pts[:, 1])
    ay = np.abs(py)
    out = -0.5 * py**2 + 0.5 * ay - 1.0 / 12.0
    for m in range(-images, images + 1):
        q = np.exp(2j * np.pi * px - 2.0 * np.pi * np.abs(py + m))
        out = out + np.log(np.abs(1.0 - q)) / (2.0 * np.pi)
    return out.reshape(shape)


def check_R_expansion(
    g: TorusGreen,
    radii: Sequence[float],
    directions: int = 8,
) -> ExpansionFit:
    """
    Fit the expansion R(x) = R(0) − |x|²/(2d) + O(|x|⁴) near the origin.

    Samples directions θ = mπ/4, where the quartic harmonic does not vanish.

    Returns:
        ExpansionFit with the log-log slope of |R(x) − R(0) + |x|²/(2d)| against
        |x|, the fitted |x|² coefficient, and the residual table.

    Raises:
        DomainError: Fewer than two radii or radii outside (0, 0.2].
    """
    radii = [float(r) for r in radii]
    if len(radii) < 2:
        raise DomainError("need ≥ 2 radii")
    if any(not 0.0 < r <= 0.2 for r in radii):
        raise DomainError("radii must lie in (0, 0.2]")
    if g.dim != 2:
        raise UnsupportedError("the expansion check runs in d = 2")

    d = g.dim
    angles = np.arange(directions) * np.pi / 4.0
    rows: List[Tuple[float, float, float]] = []
    log_r, log_res = [], []
    quad = []
    for theta in angles:
        u = np.array([np.cos(theta), np.sin(theta)])
        r = np.array(radii)
        values = g.R(r[:, None] * u[None, :]) - g.r0
        residual = np.abs(values + r**2 / (2.0 * d))
        for ri, res in zip(r, residual):
            rows.append((float(ri), float(theta), float(res)))
            log_r.append(np.log(ri))
            log_res.append(np.log(res))
        design = np.column_stack([r**2, r**4])
        coeffs, *_ = np.linalg.lstsq(design, values, rcond=None)
        quad.append(coeffs[0])

    slope = float(np.polyfit(log_r, log_res, 1)[0])
    fit = ExpansionFit(
        slope=slope,
        quadratic_coefficient=float(np.mean(quad)),
        r0=g.r0,
        rows=rows,
    )
    logger.info(f"R expansion: remainder slope {fit.slope:.4f}, |x|² coefficient {fit.quadratic_coefficient:.6f}")
    return fit
