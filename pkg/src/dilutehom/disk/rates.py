"""
Regime classification and convergence-rate sweeps on the perforated disk.
"""

import logging
from dataclasses import dataclass
from itertools import product
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np

from ..cell.solver import solve_cell
from ..core.config import Config
from ..core.errors import DomainError, UnsupportedError
from ..core.results import EffectiveTensor, RateReport, RateRow, ResultTable
from ..geometry.curves import HoleShape, parse_shape
from ..geometry.quadrature import SampleGrid
from ..green.torus import TorusGreen
from ..homogenization.tensor import effective
from ..utils.fitting import loglog_slope, ratio_spread
from ..utils.parallel import ordered_map
from .corrector import CorrectorField, Discrepancy, corrector_field, h1_discrepancy, sampling_grid
from .domain import PerforatedDiskProblem, build_domain
from .solver import FullSolution, HomogenizedSolution, solve_full, solve_homogenized


logger = logging.getLogger("dilutehom.disk")

SATURATED = "saturated"
DILUTE_CRITICAL = "dilute-critical"
CROSSOVER = "crossover"

SATURATED_RHO = 10.0
DILUTE_RHO = 0.1


@dataclass(frozen=True)
class RegimeInfo:
    tag: str
    sigma: float
    kappa: float
    rho: float


def sigma_epsilon(epsilon: float, eta: float, dim: int = 2) -> float:
    if dim == 2:
        return float(epsilon * np.sqrt(abs(np.log(eta))))
    return float(epsilon * eta ** (-(dim - 2) / 2.0))


def kappa_epsilon_eta(epsilon: float, eta: float, dim: int = 2) -> float:
    first = np.sqrt(eta ** (dim - 1) / epsilon)
    second = np.sqrt(epsilon * eta * (abs(np.log(eta)) if dim == 2 else 1.0))
    return float(max(first, second))


def regime_classify(epsilon: float, eta: float, dim: int = 2) -> RegimeInfo:
    """
    Tag (ε, η) by ρ = η^{d−2}/σ_ε²: saturated when ρ ≥ 10, dilute-critical when ρ ≤ 0.1.

    At η = 1 in d = 2, σ_ε vanishes and the pair is saturated.
    """
    if dim not in (2, 3):
        raise DomainError(f"regimes are defined for d = 2 or 3, got {dim}")
    if not 0.0 < eta <= 1.0:
        raise DomainError(f"eta must be in (0,1], got {eta}")
    sigma = sigma_epsilon(epsilon, eta, dim)
    rho = float(eta ** (dim - 2) / sigma**2) if sigma > 0 else float("inf")
    if rho >= SATURATED_RHO:
        tag = SATURATED
    elif rho <= DILUTE_RHO:
        tag = DILUTE_CRITICAL
    else:
        tag = CROSSOVER
    return RegimeInfo(tag, sigma, kappa_epsilon_eta(epsilon, eta, dim), rho)


def saturated_bound(eta: float, dim: int = 2) -> float:
    return float(eta ** (dim - 1))


def dilute_bound(epsilon: float, eta: float, dim: int = 2) -> float:
    if dim == 2:
        return float(np.sqrt(epsilon) * eta * np.sqrt(abs(np.log(eta))))
    return float(np.sqrt(epsilon) * eta ** (dim / 2.0))


def regime_bounds(regime: RegimeInfo, epsilon: float, eta: float, dim: int = 2) -> Tuple[float, Optional[float]]:
    """Bound of the classified branch; crossover rows also carry the dilute-critical bound."""
    if regime.tag == SATURATED:
        return saturated_bound(eta, dim), None
    if regime.tag == DILUTE_CRITICAL:
        return dilute_bound(epsilon, eta, dim), None
    return saturated_bound(eta, dim), dilute_bound(epsilon, eta, dim)


def critical_scales(epsilon: float, dim: int = 2) -> Dict[str, float]:
    """
    η_cr,1 ~ ε^{1/(d−1)}, η_cr,2 ~ ε^{2/(d−2)} (exp(−1/ε²) in d = 2) and the
    scale below which the η^{d−1} branch is the smaller bound.
    """
    cr1 = epsilon ** (1.0 / (dim - 1))
    if dim == 2:
        cr2 = float(np.exp(-1.0 / epsilon**2))
        branch = float(np.exp(-1.0 / epsilon))
    else:
        cr2 = epsilon ** (2.0 / (dim - 2))
        branch = epsilon ** (1.0 / (dim - 2))
    return {"eta_cr1": float(cr1), "eta_cr2": float(cr2), "branch": float(branch)}


FIELD_COLUMNS = ("x", "y", "u_eps", "u_hom", "corrector", "zeta")


@dataclass(eq=False)
class SolvedInstance:
    """Full, homogenized and corrector solutions of one (ε, η) instance on a shared grid."""
    problem: PerforatedDiskProblem
    tensor: EffectiveTensor
    full: FullSolution
    hom: HomogenizedSolution
    plain: HomogenizedSolution
    corrector: CorrectorField
    grid: SampleGrid

    def discrepancy(self) -> Discrepancy:
        return h1_discrepancy(self.full, self.hom, self.corrector, self.grid, self.plain)

    def field_table(self) -> ResultTable:
        """u^ε, ū, z_ε and ζ^ε = u^ε − ū − z_ε at every grid point."""
        pts = self.grid.points
        u_eps = self.full.value(pts)
        u_hom = self.hom.value(pts)
        corr = self.corrector.value(pts)
        table = ResultTable("field", FIELD_COLUMNS)
        for row in zip(pts[:, 0], pts[:, 1], u_eps, u_hom, corr, u_eps - u_hom - corr):
            table.add_row(*(float(v) for v in row))
        gap = self.discrepancy()
        table.summary = {
            "epsilon": self.problem.epsilon,
            "eta": self.problem.eta,
            "n_holes": self.problem.n_holes,
            "n_unknowns": self.full.n_unknowns,
            "a_bar": self.tensor.scalar,
            "dirichlet_residual": self.full.dirichlet_residual(),
            "neumann_residual": self.full.neumann_residual(),
            "zeta_norm": gap.zeta,
            "uu_norm": gap.uu,
            "u_ubar_norm": gap.u_ubar,
            "corrector_norm": gap.corrector,
            "excluded_annulus": gap.excluded_area,
        }
        return table


def solve_instance(
    shape: HoleShape,
    epsilon: float,
    eta: float,
    green: Optional[TorusGreen] = None,
    outer_radius: float = 1.0,
    f: Optional[Mapping[str, float]] = None,
    g: Optional[Mapping[str, float]] = None,
    boundary_nodes: int = 256,
    hole_nodes: int = 32,
    radial_samples: int = 48,
    angular_samples: int = 192,
    max_upsample: int = 64,
) -> SolvedInstance:
    """
    Raises:
        UnsupportedError: The hole shape yields an anisotropic Ā(η).
    """
    cell = solve_cell(shape, eta, green=green, max_upsample=max_upsample)
    tensor = effective(cell)
    if not tensor.is_isotropic(1e-6):
        raise UnsupportedError(
            f"the disk solver needs a square-symmetric hole; Ā({eta:g}) = {tensor.matrix.tolist()}"
        )
    problem = build_domain(outer_radius, epsilon, eta, shape, f, g, boundary_nodes, hole_nodes)
    full = solve_full(problem, max_upsample)
    hom = solve_homogenized(problem, tensor, max_upsample)
    plain = solve_homogenized(problem, None, max_upsample)
    return SolvedInstance(
        problem=problem,
        tensor=tensor,
        full=full,
        hom=hom,
        plain=plain,
        corrector=corrector_field(cell, hom, epsilon),
        grid=sampling_grid(full, radial_samples, angular_samples),
    )


@dataclass(frozen=True)
class RateTask:
    """One (ε, η) point of a rate sweep; picklable for the process pool."""
    shape: HoleShape
    epsilon: float
    eta: float
    green: TorusGreen
    outer_radius: float
    f: Tuple[Tuple[str, float], ...]
    g: Tuple[Tuple[str, float], ...]
    boundary_nodes: int
    hole_nodes: int
    radial_samples: int
    angular_samples: int
    max_upsample: int

    def run(self) -> RateRow:
        instance = solve_instance(
            self.shape, self.epsilon, self.eta, self.green, self.outer_radius,
            dict(self.f), dict(self.g), self.boundary_nodes, self.hole_nodes,
            self.radial_samples, self.angular_samples, self.max_upsample,
        )
        gap = instance.discrepancy()
        regime = regime_classify(self.epsilon, self.eta)
        bound, alt = regime_bounds(regime, self.epsilon, self.eta)
        logger.info(
            f"Rate row epsilon={self.epsilon:g} eta={self.eta:g}: {instance.problem.n_holes} holes, "
            f"zeta={gap.zeta:.3e} ({regime.tag})"
        )
        return RateRow(
            epsilon=self.epsilon,
            eta=self.eta,
            sigma=regime.sigma,
            kappa=regime.kappa,
            rho=regime.rho,
            regime=regime.tag,
            n_holes=instance.problem.n_holes,
            zeta_norm=gap.zeta,
            uu_norm=gap.uu,
            corrector_norm=gap.corrector,
            bound=bound,
            alt_bound=alt,
            ratio=gap.zeta / bound,
            excluded_annulus=gap.excluded_area,
        )


def _run_task(task: RateTask) -> RateRow:
    return task.run()


def _summarize(rows: List[RateRow], shape_label: str) -> RateReport:
    report = RateReport(rows=rows, shape_label=shape_label)
    for tag in (SATURATED, DILUTE_CRITICAL, CROSSOVER):
        tagged = report.rows_in(tag)
        if tagged and tag != CROSSOVER:
            report.spreads[tag] = ratio_spread([r.ratio for r in tagged])
    for eps in sorted({r.epsilon for r in rows}):
        same = [r for r in rows if r.epsilon == eps]
        if len(same) >= 2:
            report.slopes[f"{eps:.17g}"] = loglog_slope([r.eta for r in same], [r.zeta_norm for r in same])
        report.critical_scales[f"{eps:.17g}"] = critical_scales(eps)
    return report


def rate_sweep(config: Config, jobs: Optional[int] = None) -> RateReport:
    """
    Solve the full, homogenized and corrector problems on every (ε, η) pair.

    Raises:
        DomainError: Empty sweep.
        UnsupportedError: The hole shape yields an anisotropic Ā(η).
    """
    pairs = list(product(config.sweep.epsilons, config.sweep.etas))
    if not pairs:
        raise DomainError("empty rate sweep: configure sweep.epsilons and sweep.etas")
    shape = parse_shape(config.geometry.shape, config.geometry.n_nodes)
    if shape.dim != 2:
        raise UnsupportedError("rate sweeps run on d = 2 shapes only")
    green = TorusGreen.from_config(config.green)
    disk = config.disk
    tasks = [
        RateTask(
            shape=shape,
            epsilon=float(eps),
            eta=float(eta),
            green=green,
            outer_radius=disk.outer_radius,
            f=tuple(sorted(disk.f.items())),
            g=tuple(sorted(disk.g.items())),
            boundary_nodes=disk.boundary_nodes,
            hole_nodes=disk.hole_nodes,
            radial_samples=disk.radial_samples,
            angular_samples=disk.angular_samples,
            max_upsample=config.solver.max_upsample,
        )
        for eps, eta in pairs
    ]
    logger.info(f"Rate sweep over {len(tasks)} (epsilon, eta) pairs")
    rows = ordered_map(_run_task, tasks, jobs or config.output.jobs)
    return _summarize(rows, shape.label)
