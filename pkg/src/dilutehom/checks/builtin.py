"""
Built-in acceptance checks run by ``dilutehom selftest``.
"""

import numpy as np

from ..cell.diagnostics import energy_identity
from ..cell.solver import solve_cell, solve_exterior
from ..disk.domain import build_domain
from ..disk.solver import solve_full
from ..geometry.curves import make_sphere, parse_shape
from ..green.torus import GreenEta, check_R_expansion, mixed_series_G, r0_closed_form
from ..homogenization.sweeps import dilute_residual, tensor_sweep
from ..homogenization.tensor import polarization, polarization_for
from ..potentials.evaluation import eval_potential
from ..potentials.nystrom import OperatorKind, assemble_free
from ..potentials.series import NeumannSeries
from .base import BaseCheck


R0_REFERENCE = 0.2085778
DILUTE_ETAS = (0.3, 0.2, 0.15, 0.1, 0.075, 0.05)


class GaussIdentityCheck(BaseCheck):
    """K[1] = ½ on ∂T, D[1] = 1 inside and 0 outside, periodic D_p[1] = −|T| in the fluid."""

    name = "gauss_identities"
    description = "Gauss and jump identities on a circle of radius 0.25, 64 nodes"
    threshold = 1e-8

    def measure(self) -> float:
        shape = self.context.circle()
        ones = np.ones(shape.n_nodes)
        k_one = assemble_free(shape, OperatorKind.K).apply(ones)
        err = float(np.max(np.abs(k_one - 0.5)))
        inside = eval_potential(shape, ones, "D", [[0.05, 0.02], [-0.1, 0.12]])
        outside = eval_potential(shape, ones, "D", [[0.4, 0.1], [-0.3, -0.35]])
        err = max(err, float(np.max(np.abs(inside - 1.0))), float(np.max(np.abs(outside))))

        # ∂_{N_y} G(x − y) = ∂_{N_y} Γ(x − y) − N_y·∇(G − Γ)(x − y)
        green = GreenEta(1.0, self.context.green)
        x = np.array([0.4, 0.1])
        smooth = np.einsum("jd,jd->j", green.grad_perturbation(x[None, :] - shape.points), shape.normals)
        periodic = eval_potential(shape, ones, "D", x[None, :])[0] - float(np.dot(smooth, shape.weights))
        err = max(err, abs(periodic + shape.area))
        return err


class RegularPartCheck(BaseCheck):
    """R(0) against its closed form and G against the mixed Fourier/image series."""

    name = "green_regular_part"
    description = "R(0) closed form and Ewald vs mixed-series G"
    threshold = 1e-6

    def measure(self) -> float:
        g = self.context.green
        err = max(abs(g.r0 - r0_closed_form(2)), abs(g.r0 - R0_REFERENCE))
        probes = np.array([[0.3, 0.2], [0.45, -0.1], [-0.25, 0.4], [0.1, 0.05]])
        err = max(err, float(np.max(np.abs(g.G(probes) - mixed_series_G(probes)))))
        return err


class ExpansionSlopeCheck(BaseCheck):
    """Quartic remainder of R − R(0) + |x|²/4 decays with slope 4."""

    name = "green_expansion_slope"
    description = "|slope − 4| of the regular-part remainder"
    threshold = 0.2

    def measure(self) -> float:
        fit = check_R_expansion(self.context.green, [0.2, 0.1, 0.05, 0.025])
        self.logger.info(f"quadratic coefficient {fit.quadratic_coefficient:.6f}")
        return abs(fit.slope - 4.0)


class QuadraticCoefficientCheck(BaseCheck):
    name = "green_quadratic_coefficient"
    description = "|x|² coefficient of R equals −1/4"
    threshold = 1e-3

    def measure(self) -> float:
        fit = check_R_expansion(self.context.green, [0.2, 0.1, 0.05, 0.025])
        return abs(fit.quadratic_coefficient + 0.25)


class ExteriorCircleCheck(BaseCheck):
    """φ⁰_k = −2N^k, w⁰_k = z_k on ∂T and M = πa²I for a circle."""

    name = "exterior_circle"
    description = "exterior densities, traces and polarization of the circle"
    threshold = 1e-8

    def measure(self) -> float:
        shape = self.context.circle()
        ext = solve_exterior(shape)
        err = 0.0
        for k in range(2):
            err = max(err, float(np.max(np.abs(ext.densities[k].values + 2.0 * shape.normals[:, k]))))
            err = max(err, float(np.max(np.abs(ext.boundary_w(k) - shape.points[:, k]))))
        m = polarization(ext).matrix
        return max(err, float(np.max(np.abs(m - np.pi * 0.25**2 * np.eye(2)))))


class SphereCheck(BaseCheck):
    name = "sphere_polarization"
    description = "ball polarization equals (|T|/2)·I"
    threshold = 1e-14

    def measure(self) -> float:
        shape = make_sphere(0.25)
        m = polarization_for(shape).matrix
        return float(np.max(np.abs(m - 0.5 * shape.area * np.eye(3))))


class SeriesRatioCheck(BaseCheck):
    """Observed Neumann-series term ratio against its first-order prediction."""

    name = "series_ratio"
    description = "relative gap between observed and predicted series ratios at η = 0.2, 0.1"
    threshold = 0.2

    def measure(self) -> float:
        shape = self.context.circle()
        worst = 0.0
        for eta in (0.2, 0.1):
            series = NeumannSeries(shape, GreenEta(eta, self.context.green))
            rhs = -shape.normals[:, 0]
            ratios = series.term_ratios(rhs, 3)
            predicted = series.predicted_ratio(series.free.solve(rhs))
            bound = eta ** (series.dim - 1)
            if ratios[0] > bound:
                return float("inf")
            worst = max(worst, abs(ratios[0] / predicted - 1.0))
        return worst


class SeriesMeanCheck(BaseCheck):
    name = "series_mean_zero"
    description = "every Neumann-series partial sum has zero mean"
    threshold = 1e-9

    def measure(self) -> float:
        shape = self.context.circle()
        worst = 0.0
        for eta in (0.2, 0.1):
            series = NeumannSeries(shape, GreenEta(eta, self.context.green))
            for k in range(2):
                for partial in series.partial_sums(-shape.normals[:, k], 3):
                    worst = max(worst, abs(float(np.dot(shape.weights, partial))))
        return worst


class EnergyIdentityCheck(BaseCheck):
    name = "energy_identity"
    description = "relative gap between volume and boundary forms of ‖∇χ̃‖² at η = 0.2"
    threshold = 0.01

    def measure(self) -> float:
        sol = solve_cell(self.context.circle(n_nodes=128), 0.2, green=self.context.green)
        volume, boundary = energy_identity(sol, 0)
        return abs(volume - boundary) / abs(boundary)


class TensorSymmetryCheck(BaseCheck):
    name = "tensor_symmetry"
    description = "Ā(η) symmetric without symmetrization"
    threshold = 1e-8

    def measure(self) -> float:
        geometry = self.context.config.geometry
        hole = parse_shape(geometry.shape, geometry.n_nodes)
        tensors = tensor_sweep(hole, [0.3, 0.1], green=self.context.green)
        return max(t.symmetry_defect for t in tensors)


class DiluteSlopeCheck(BaseCheck):
    """log-log slope of ‖Ā(η) − (I − η²M)‖ over the dilute η list."""

    name = "dilute_slope"
    description = "|slope − 4| of the dilute expansion residual"
    threshold = 0.5
    slow = True

    def measure(self) -> float:
        _, slope = dilute_residual(
            self.context.circle(n_nodes=128), DILUTE_ETAS, green=self.context.green,
            jobs=self.context.config.output.jobs,
        )
        return abs(slope - 4.0)


class DiskOracleCheck(BaseCheck):
    """Unperforated unit disk with f = 4, g = 0 reproduces 1 − |x|²."""

    name = "disk_oracle"
    description = "radial closed form of −Δu = 4 on the unit disk"
    threshold = 1e-8

    def measure(self) -> float:
        problem = build_domain(1.0, 0.5, 0.2, self.context.circle(), f={"0,0": 4.0}).without_holes()
        sol = solve_full(problem)
        probes = np.array([[0.0, 0.0], [0.3, -0.2], [-0.5, 0.4], [0.1, 0.7]])
        exact = 1.0 - np.sum(probes**2, axis=1)
        return float(np.max(np.abs(sol.value(probes) - exact)))


BUILTIN_CHECKS = (
    GaussIdentityCheck,
    RegularPartCheck,
    ExpansionSlopeCheck,
    QuadraticCoefficientCheck,
    ExteriorCircleCheck,
    SphereCheck,
    SeriesRatioCheck,
    SeriesMeanCheck,
    EnergyIdentityCheck,
    TensorSymmetryCheck,
    DiluteSlopeCheck,
    DiskOracleCheck,
)
