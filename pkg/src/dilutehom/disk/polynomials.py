"""
Bivariate polynomials for the source f and the Dirichlet data g.

Coefficients are stored as c[i, j] for x**i * y**j and evaluated with
``numpy.polynomial.polynomial``.
"""

from dataclasses import dataclass
from typing import Dict, Mapping

import numpy as np
from numpy.polynomial import polynomial as P

from ..core.errors import DomainError


MAX_DEGREE = 4


def _trim(c: np.ndarray) -> np.ndarray:
    nz = np.argwhere(c != 0.0)
    if nz.size == 0:
        return np.zeros((1, 1))
    return c[: nz[:, 0].max() + 1, : nz[:, 1].max() + 1]


@dataclass(frozen=True, eq=False)
class Polynomial2D:
    """p(x, y) = Σ c[i, j] x^i y^j."""
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.coefficients, dtype=float))
        object.__setattr__(self, "coefficients", _trim(c))

    @classmethod
    def from_terms(cls, terms: Mapping[str, float], max_degree: int = MAX_DEGREE) -> "Polynomial2D":
        """
        Build from a ``{"i,j": c}`` map.

        Raises:
            DomainError: Malformed key or total degree above ``max_degree``.
        """
        c = np.zeros((max_degree + 1, max_degree + 1))
        for key, value in (terms or {}).items():
            try:
                i, j = (int(p) for p in str(key).split(","))
            except ValueError:
                raise DomainError(f"malformed monomial key {key!r}, expected 'i,j'")
            if i < 0 or j < 0 or i + j > max_degree:
                raise DomainError(f"monomial {key!r} exceeds degree {max_degree}")
            c[i, j] += float(value)
        return cls(c)

    @classmethod
    def constant(cls, value: float) -> "Polynomial2D":
        return cls(np.array([[float(value)]]))

    @property
    def degree(self) -> int:
        nz = np.argwhere(self.coefficients != 0.0)
        return int((nz[:, 0] + nz[:, 1]).max()) if nz.size else 0

    @property
    def is_zero(self) -> bool:
        return not np.any(self.coefficients)

    def to_terms(self) -> Dict[str, float]:
        return {
            f"{i},{j}": float(self.coefficients[i, j])
            for i, j in zip(*np.nonzero(self.coefficients))
        }

    def __call__(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        return P.polyval2d(pts[..., 0], pts[..., 1], self.coefficients)

    def __add__(self, other: "Polynomial2D") -> "Polynomial2D":
        a, b = self.coefficients, other.coefficients
        out = np.zeros((max(a.shape[0], b.shape[0]), max(a.shape[1], b.shape[1])))
        out[: a.shape[0], : a.shape[1]] += a
        out[: b.shape[0], : b.shape[1]] += b
        return Polynomial2D(out)

    def __mul__(self, scale: float) -> "Polynomial2D":
        return Polynomial2D(self.coefficients * float(scale))

    __rmul__ = __mul__

    def __neg__(self) -> "Polynomial2D":
        return self * -1.0

    def derivative(self, dx: int = 0, dy: int = 0) -> "Polynomial2D":
        c = self.coefficients
        if dx:
            c = P.polyder(c, dx, axis=0) if c.shape[0] > dx else np.zeros((1, c.shape[1]))
        if dy:
            c = P.polyder(c, dy, axis=1) if c.shape[1] > dy else np.zeros((c.shape[0], 1))
        return Polynomial2D(c)

    def gradient(self, points) -> np.ndarray:
        return np.stack(
            [self.derivative(1, 0)(points), self.derivative(0, 1)(points)], axis=-1
        )

    def hessian(self, points) -> np.ndarray:
        hxx = self.derivative(2, 0)(points)
        hxy = self.derivative(1, 1)(points)
        hyy = self.derivative(0, 2)(points)
        return np.stack(
            [np.stack([hxx, hxy], -1), np.stack([hxy, hyy], -1)], -2
        )

    def laplacian(self) -> "Polynomial2D":
        return self.derivative(2, 0) + self.derivative(0, 2)

    def particular_solution(self) -> "Polynomial2D":
        """
        u_p with −Δu_p = self.

        P₀ = ∬f dx dx and P_{m+1} = −∬∂_yy P_m dx dx; the y-degree drops by two per
        step, so ΔΣP_m = f after finitely many terms and u_p = −ΣP_m.
        """
        total = Polynomial2D.constant(0.0)
        term = Polynomial2D(P.polyint(self.coefficients, 2, axis=0))
        while not term.is_zero:
            total = total + term
            term = -Polynomial2D(P.polyint(term.derivative(0, 2).coefficients, 2, axis=0))
        return -total
