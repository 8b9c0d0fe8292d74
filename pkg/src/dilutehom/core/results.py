"""
Result records produced by the solvers and consumed by the reporters.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np


class CheckStatus(Enum):
    """Outcome of a self-test check."""
    PASS = "PASS"
    FAIL = "FAIL"
    SKIP = "SKIP"

    def __str__(self) -> str:
        return self.value

    @property
    def color_code(self) -> str:
        """ANSI color codes for terminal output."""
        colors = {
            CheckStatus.PASS: "\033[92m",  # Green
            CheckStatus.FAIL: "\033[91m",  # Red
            CheckStatus.SKIP: "\033[93m",  # Yellow
        }
        return colors.get(self, "\033[0m")

    @property
    def reset_code(self) -> str:
        """ANSI reset code."""
        return "\033[0m"


@dataclass
class CheckResult:
    """Result of one acceptance check run by ``selftest``."""
    name: str
    status: CheckStatus
    measured: float
    threshold: float
    message: str = ""

    @property
    def passed(self) -> bool:
        return self.status is CheckStatus.PASS

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "status": self.status.value,
            "measured": float(self.measured),
            "threshold": float(self.threshold),
            "message": self.message,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CheckResult":
        return cls(
            name=data["name"],
            status=CheckStatus(data["status"]),
            measured=float(data["measured"]),
            threshold=float(data["threshold"]),
            message=data.get("message", ""),
        )

    def __str__(self) -> str:
        return (
            f"{self.status.color_code}[{self.status.value}]{self.status.reset_code} "
            f"{self.name}: {self.measured:.3e} (threshold {self.threshold:.3e})"
        )


@dataclass
class EffectiveTensor:
    """The constant matrix Ā(η) with provenance metadata."""
    eta: float
    matrix: np.ndarray
    shape_label: str
    n_nodes: int
    method: str = "direct"
    volume_fraction: float = 0.0

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=float)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def symmetry_defect(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.T)))

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.T))

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues[0])

    def is_isotropic(self, tol: float = 1e-8) -> bool:
        """True when the tensor is a multiple of the identity up to ``tol``."""
        diag = np.diag(self.matrix)
        off = self.matrix - np.diag(diag)
        return bool(np.max(np.abs(off)) <= tol and np.ptp(diag) <= tol)

    @property
    def scalar(self) -> float:
        """Mean diagonal entry; the conductivity of an isotropic tensor."""
        return float(np.trace(self.matrix) / self.dim)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "eta": self.eta,
            "matrix": self.matrix.tolist(),
            "shape": self.shape_label,
            "n_nodes": self.n_nodes,
            "method": self.method,
            "volume_fraction": self.volume_fraction,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "EffectiveTensor":
        return cls(
            eta=float(data["eta"]),
            matrix=np.array(data["matrix"], dtype=float),
            shape_label=data["shape"],
            n_nodes=int(data["n_nodes"]),
            method=data.get("method", "direct"),
            volume_fraction=float(data.get("volume_fraction", 0.0)),
        )

    @classmethod
    def identity(cls, dim: int = 2) -> "EffectiveTensor":
        return cls(eta=0.0, matrix=np.eye(dim), shape_label="none", n_nodes=0)


@dataclass
class PolarizationTensor:
    """Gram matrix M_ij of the exterior-problem gradients."""
    matrix: np.ndarray
    shape_label: str
    n_nodes: int = 0

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=float)

    @property
    def symmetry_defect(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.T)))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "matrix": self.matrix.tolist(),
            "shape": self.shape_label,
            "n_nodes": self.n_nodes,
        }


@dataclass
class ExpansionFit:
    """Fit of the regular part R near the origin."""
    slope: float
    quadratic_coefficient: float
    r0: float
    # (radius, direction angle, residual)
    rows: List[Tuple[float, float, float]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "slope": self.slope,
            "quadratic_coefficient": self.quadratic_coefficient,
            "r0": self.r0,
            "rows": [list(r) for r in self.rows],
        }


@dataclass
class RateRow:
    """One (ε, η) row of a convergence-rate sweep."""
    epsilon: float
    eta: float
    sigma: float
    kappa: float
    rho: float
    regime: str
    n_holes: int
    zeta_norm: float
    uu_norm: float
    corrector_norm: float
    bound: float
    alt_bound: Optional[float]
    ratio: float
    excluded_annulus: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "epsilon": self.epsilon,
            "eta": self.eta,
            "sigma": self.sigma,
            "kappa": self.kappa,
            "rho": self.rho,
            "regime": self.regime,
            "n_holes": self.n_holes,
            "zeta_norm": self.zeta_norm,
            "uu_norm": self.uu_norm,
            "corrector_norm": self.corrector_norm,
            "bound": self.bound,
            "alt_bound": self.alt_bound,
            "ratio": self.ratio,
            "excluded_annulus": self.excluded_annulus,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RateRow":
        return cls(**data)


RATE_COLUMNS = (
    "epsilon", "eta", "sigma", "kappa", "rho", "regime", "n_holes", "zeta_norm",
    "uu_norm", "corrector_norm", "bound", "alt_bound", "ratio", "excluded_annulus",
)


@dataclass
class RateReport:
    """Rows of a rate sweep with per-regime summaries."""
    rows: List[RateRow]
    shape_label: str
    slopes: Dict[str, float] = field(default_factory=dict)
    spreads: Dict[str, float] = field(default_factory=dict)
    critical_scales: Dict[str, Dict[str, float]] = field(default_factory=dict)

    def rows_in(self, regime: str) -> List[RateRow]:
        return [r for r in self.rows if r.regime == regime]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "shape": self.shape_label,
            "rows": [r.to_dict() for r in self.rows],
            "slopes": dict(self.slopes),
            "spreads": dict(self.spreads),
            "critical_scales": {k: dict(v) for k, v in self.critical_scales.items()},
        }

    def to_table(self) -> "ResultTable":
        table = ResultTable("rates", RATE_COLUMNS)
        for row in self.rows:
            values = row.to_dict()
            table.add_row(*(values[c] for c in RATE_COLUMNS))
        table.summary = {
            "shape": self.shape_label,
            "slopes": dict(self.slopes),
            "spreads": dict(self.spreads),
            "critical_scales": {k: dict(v) for k, v in self.critical_scales.items()},
        }
        return table


@dataclass
class ResultTable:
    """Column-oriented table written by the CSV/JSON/SVG reporters."""
    name: str
    columns: Sequence[str]
    rows: List[Sequence[Any]] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)

    def add_row(self, *values: Any) -> None:
        if len(values) != len(self.columns):
            raise ValueError(
                f"Row has {len(values)} values, table {self.name!r} "
                f"has {len(self.columns)} columns"
            )
        self.rows.append(list(values))

    def column(self, name: str) -> List[Any]:
        idx = list(self.columns).index(name)
        return [row[idx] for row in self.rows]


def checks_table(results: Sequence[CheckResult]) -> ResultTable:
    """Selftest results as a table; the summary counts each status."""
    table = ResultTable("selftest", ("name", "status", "measured", "threshold", "message"))
    for r in results:
        table.add_row(r.name, r.status.value, r.measured, r.threshold, r.message)
    table.summary = {s.value: sum(1 for r in results if r.status is s) for s in CheckStatus}
    return table
