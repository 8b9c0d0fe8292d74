"""
Neumann-series inversion of the periodic adjoint double-layer system.

(½I + K* + η^{d−1} R2)^{−1} = Σ_ℓ (−1)^ℓ η^{ℓ(d−1)} R3^ℓ (½I + K*)^{−1},
with R3 = (½I + K*)^{−1} R2.
"""

import logging
from typing import List, Optional

import numpy as np

from ..core.errors import SeriesDivergenceError
from ..geometry.curves import HoleShape
from ..green.torus import GreenEta
from .nystrom import (
    BoundaryDensity,
    DenseSystem,
    OperatorKind,
    assemble_free,
    assemble_periodic,
    second_kind,
)


logger = logging.getLogger("dilutehom.potentials")


class NeumannSeries:
    """Truncated Neumann series around the free-space operator ½I + K*."""

    def __init__(self, shape: HoleShape, green: GreenEta, free: Optional[DenseSystem] = None):
        self.shape = shape
        self.green = green
        self.eta = green.eta
        self.dim = green.dim
        if free is None:
            free = DenseSystem(second_kind(assemble_free(shape, OperatorKind.KSTAR)), "½I + K*")
        self.free = free
        self.r2 = assemble_periodic(shape, green, OperatorKind.R2).matrix
        self.scale = self.eta ** (self.dim - 1)

    def apply_r3(self, values: np.ndarray) -> np.ndarray:
        return self.free.solve(self.r2 @ values)

    def terms(self, rhs: np.ndarray, n_terms: int) -> List[np.ndarray]:
        """
        Series terms (−1)^ℓ η^{ℓ(d−1)} R3^ℓ (½I + K*)^{−1} rhs for ℓ = 0..n_terms.

        Raises:
            SeriesDivergenceError: A term is not smaller than its predecessor.
        """
        out = [self.free.solve(rhs)]
        for ell in range(1, n_terms + 1):
            nxt = -self.scale * self.apply_r3(out[-1])
            prev_norm = float(np.max(np.abs(out[-1])))
            norm = float(np.max(np.abs(nxt)))
            logger.debug(f"Neumann term {ell}: sup norm {norm:.3e}")
            if prev_norm > 0 and norm >= prev_norm:
                raise SeriesDivergenceError(
                    f"η above Neumann-series radius: term {ell} grew "
                    f"({norm:.3e} >= {prev_norm:.3e}) at η = {self.eta:g}"
                )
            out.append(nxt)
        return out

    def inverse(self, rhs: np.ndarray, n_terms: int) -> np.ndarray:
        return np.sum(self.terms(rhs, n_terms), axis=0)

    def partial_sums(self, rhs: np.ndarray, n_terms: int) -> List[np.ndarray]:
        return list(np.cumsum(self.terms(rhs, n_terms), axis=0))

    def term_ratios(self, rhs: np.ndarray, n_terms: int) -> List[float]:
        """Ratios of successive term sup-norms."""
        norms = [float(np.max(np.abs(t))) for t in self.terms(rhs, n_terms)]
        return [b / a for a, b in zip(norms[:-1], norms[1:])]

    def predicted_ratio(self, phi0: np.ndarray) -> float:
        """η^{d−1} times the weighted Rayleigh quotient of R3 at φ⁰."""
        w = self.shape.weights
        num = float(np.dot(w * phi0, self.apply_r3(phi0)))
        den = float(np.dot(w * phi0, phi0))
        return self.scale * abs(num) / den


def neumann_series_inverse(series: NeumannSeries, rhs: BoundaryDensity, n_terms: int) -> BoundaryDensity:
    """L-term Neumann-series approximation of (½I + K^{η,*}_p)^{−1} rhs."""
    return BoundaryDensity(rhs.shape, series.inverse(rhs.values, n_terms))


def neumann_series_terms(series: NeumannSeries, rhs: BoundaryDensity, n_terms: int) -> List[float]:
    """Sup norms of the individual series terms."""
    return [float(np.max(np.abs(t))) for t in series.terms(rhs.values, n_terms)]
