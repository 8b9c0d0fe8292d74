"""
Unit tests for the perforated disk: domain, polynomials, solvers, corrector and regimes.
"""

import logging

import numpy as np
import pytest

from dilutehom.cell.solver import solve_cell
from dilutehom.core.config import Config
from dilutehom.core.errors import DomainError, UnsupportedError
from dilutehom.core.results import EffectiveTensor
from dilutehom.disk.corrector import (
    corrector_field,
    h1_norm,
    homogenized_gradient_gap,
    homogenized_sup_gap,
    sampling_grid,
)
from dilutehom.disk.domain import build_domain, hole_centers
from dilutehom.disk.polynomials import Polynomial2D
from dilutehom.disk.rates import (
    CROSSOVER,
    DILUTE_CRITICAL,
    FIELD_COLUMNS,
    SATURATED,
    critical_scales,
    dilute_bound,
    rate_sweep,
    regime_bounds,
    regime_classify,
    saturated_bound,
    solve_instance,
)
from dilutehom.disk.solver import boundary_node_count, solve_full, solve_homogenized
from dilutehom.geometry.curves import circle_shape, make_sphere
from dilutehom.geometry.quadrature import disk_sampling_grid
from dilutehom.homogenization.tensor import effective
from dilutehom.reporters import CSVReporter
from dilutehom.utils.fitting import ratio_spread


PROBES = np.array([[0.0, 0.0], [0.3, -0.2], [-0.5, 0.4], [0.1, 0.7]])
SOURCE = {"0,0": 4.0}


@pytest.fixture
def unperforated(circle):
    """Unit disk with f = 4, g = 0 and no holes."""
    return build_domain(1.0, 0.5, 0.2, circle, f=SOURCE).without_holes()


def test_hole_centers():
    """ε = 1/4, η = 0.2 keeps the 37 lattice points with |εk| + 2εη < 1."""
    centers = hole_centers(1.0, 0.25, 0.2)
    assert centers.shape == (37, 2)
    assert np.all(np.hypot(centers[:, 0], centers[:, 1]) + 0.1 < 1.0)
    assert [0.0, 0.0] in centers.tolist()


def test_hole_centers_shrink_with_eta():
    counts = [hole_centers(1.0, 0.25, eta).shape[0] for eta in (0.1, 0.5, 1.0)]
    assert counts == sorted(counts, reverse=True)


def test_build_domain(circle):
    problem = build_domain(1.0, 0.25, 0.2, circle, f=SOURCE, hole_nodes=16)
    assert problem.n_holes == 37
    assert problem.hole_scale == pytest.approx(0.05)
    assert problem.model_hole.n_nodes == 16
    assert problem.hole_reach == pytest.approx(0.0125)
    assert problem.min_boundary_gap() > 0
    assert len(problem.holes()) == 37
    assert problem.without_holes().n_holes == 0


def test_build_domain_errors(circle):
    with pytest.raises(DomainError, match="outer radius must be positive"):
        build_domain(-1.0, 0.25, 0.2, circle)
    with pytest.raises(DomainError, match=r"epsilon must be in \(0,1\)"):
        build_domain(1.0, 1.5, 0.2, circle)
    with pytest.raises(DomainError, match=r"eta must be in \(0,1\]"):
        build_domain(1.0, 0.25, 0.0, circle)
    with pytest.raises(UnsupportedError, match="two-dimensional"):
        build_domain(1.0, 0.25, 0.2, make_sphere(0.25))


def test_build_domain_without_interior_holes(circle, caplog):
    with caplog.at_level(logging.WARNING, logger="dilutehom.disk"):
        problem = build_domain(1.0, 0.9, 1.0, circle)
    assert problem.n_holes == 0
    assert "No interior hole" in caplog.text


def test_polynomial_evaluation():
    p = Polynomial2D.from_terms({"2,0": 1.0, "0,2": 1.0, "1,1": -2.0})
    assert p.degree == 2
    assert p(np.array([1.0, 2.0])) == pytest.approx(1.0)
    assert p.to_terms() == {"0,2": 1.0, "1,1": -2.0, "2,0": 1.0}
    np.testing.assert_allclose(p.gradient(np.array([[1.0, 2.0]])), [[-2.0, 2.0]])
    np.testing.assert_allclose(p.hessian(np.array([[0.3, 0.1]]))[0], [[2.0, -2.0], [-2.0, 2.0]])
    assert p.laplacian().to_terms() == {"0,0": 4.0}


def test_polynomial_arithmetic():
    p = Polynomial2D.from_terms({"1,0": 2.0})
    q = Polynomial2D.from_terms({"1,0": -2.0, "0,0": 1.0})
    assert (p + q).to_terms() == {"0,0": 1.0}
    assert (p + q).degree == 0
    assert (-p).to_terms() == {"1,0": -2.0}
    assert (3 * p).to_terms() == {"1,0": 6.0}
    assert (p + (-p)).is_zero
    assert Polynomial2D.constant(0.0).is_zero
    assert p.derivative(2, 0).is_zero


def test_polynomial_errors():
    with pytest.raises(DomainError, match="malformed monomial"):
        Polynomial2D.from_terms({"x": 1.0})
    with pytest.raises(DomainError, match="exceeds degree"):
        Polynomial2D.from_terms({"3,2": 1.0})


@pytest.mark.parametrize("terms", [
    {"0,0": 4.0},
    {"1,0": 1.0, "0,1": -3.0},
    {"1,2": 1.0, "0,0": 3.0},
    {"0,4": 2.0, "2,2": -1.0, "3,0": 0.5},
])
def test_particular_solution(terms):
    """−Δu_p = f exactly."""
    f = Polynomial2D.from_terms(terms)
    up = f.particular_solution()
    residual = -up.laplacian() + (-f)
    assert np.max(np.abs(residual.coefficients)) < 1e-12


def test_unperforated_disk_oracle(unperforated):
    """f = 4, g = 0 on the unit disk gives 1 − |x|²."""
    sol = solve_full(unperforated)
    exact = 1.0 - np.sum(PROBES**2, axis=1)
    np.testing.assert_allclose(sol.value(PROBES), exact, atol=1e-8)
    np.testing.assert_allclose(sol.gradient(PROBES), -2.0 * PROBES, atol=1e-8)
    assert sol.dirichlet_residual() < 1e-10
    assert sol.neumann_residual() == 0.0
    assert sol.n_unknowns == 256


def test_boundary_data_is_reproduced(circle):
    """Harmonic g with f = 0 is reproduced inside the unperforated disk."""
    problem = build_domain(1.0, 0.5, 0.2, circle, g={"2,0": 1.0, "0,2": -1.0, "1,0": 0.5}).without_holes()
    sol = solve_full(problem)
    np.testing.assert_allclose(sol.value(PROBES), problem.g(PROBES), atol=1e-8)


def test_homogenized_scaling(unperforated):
    """ū = (1 − |x|²)/ā for Ā = āI."""
    tensor = EffectiveTensor(0.2, 0.8 * np.eye(2), "circle:0.25", 64)
    hom = solve_homogenized(unperforated, tensor)
    assert hom.coefficient == pytest.approx(0.8)
    np.testing.assert_allclose(hom.value(PROBES), (1.0 - np.sum(PROBES**2, axis=1)) / 0.8, atol=1e-8)
    np.testing.assert_allclose(hom.hessian(PROBES), np.broadcast_to(-2.5 * np.eye(2), (4, 2, 2)), atol=1e-7)
    plain = solve_homogenized(unperforated)
    assert plain.coefficient == 1.0


def test_homogenized_gaps(unperforated):
    hom = solve_homogenized(unperforated, EffectiveTensor(0.2, 0.8 * np.eye(2), "circle:0.25", 64))
    plain = solve_homogenized(unperforated)
    grid = disk_sampling_grid(1.0, 16, 64, boundary_annulus=0.1)
    # ū − u = 0.25(1 − |x|²)
    assert homogenized_sup_gap(hom, plain, grid) == pytest.approx(0.25, abs=1e-3)
    expected = np.sqrt(grid.integrate(np.sum((0.5 * grid.points) ** 2, axis=1)))
    assert homogenized_gradient_gap(hom, plain, grid) == pytest.approx(expected, rel=1e-6)


def test_homogenized_rejects_anisotropic_tensor(unperforated):
    tensor = EffectiveTensor(0.2, np.diag([0.9, 0.8]), "ellipse", 64)
    with pytest.raises(UnsupportedError, match="isotropic"):
        solve_homogenized(unperforated, tensor)


def test_corrector_shift(cell_circle):
    """Shifting χ_k by c_k changes z_ε by εc_k∂_kū and ∇z_ε by εc_k∇∂_kū."""
    problem = build_domain(1.0, 0.25, 0.2, cell_circle.shape, f=SOURCE)
    hom = solve_homogenized(problem)
    eps = 0.25
    shift = (0.1, -0.2)
    base = corrector_field(cell_circle, hom, eps)
    moved = corrector_field(cell_circle, hom, eps, shift)
    pts = np.array([[0.11, 0.07], [-0.32, 0.4]])
    grad_u = hom.gradient(pts)
    hess_u = hom.hessian(pts)
    np.testing.assert_allclose(
        moved.value(pts) - base.value(pts), eps * (grad_u @ np.array(shift)), atol=1e-12
    )
    np.testing.assert_allclose(
        moved.gradient(pts) - base.gradient(pts), eps * np.einsum("k,mkd->md", shift, hess_u), atol=1e-12
    )


def test_corrector_eta_mismatch(cell_circle, circle):
    problem = build_domain(1.0, 0.25, 0.1, circle, f=SOURCE)
    with pytest.raises(DomainError, match="does not match"):
        corrector_field(cell_circle, solve_homogenized(problem), 0.25)


def test_h1_norm_of_constant():
    grid = disk_sampling_grid(1.0, 16, 64)
    assert h1_norm(grid, np.ones(len(grid.points)), np.zeros((len(grid.points), 2))) == pytest.approx(
        np.sqrt(np.pi), rel=1e-10
    )


def test_boundary_node_count(circle):
    assert boundary_node_count(build_domain(1.0, 0.5, 0.2, circle).without_holes()) == 256
    n = boundary_node_count(build_domain(1.0, 0.1, 0.2, circle))
    assert n >= 256
    assert n & (n - 1) == 0
    assert n <= 4096


def test_regime_saturated_example():
    """ε = η = 0.1 in d = 2: σ² = 0.01·|log 0.1|, ρ ≈ 43.4."""
    info = regime_classify(0.1, 0.1)
    assert info.sigma**2 == pytest.approx(0.01 * np.log(10.0), rel=1e-12)
    assert info.rho == pytest.approx(43.43, abs=0.01)
    assert info.tag == SATURATED


def test_regime_three_dimensions():
    """η = ε² in d = 3 puts σ_ε at 1."""
    eps = 0.5
    info = regime_classify(eps, eps**2, dim=3)
    assert info.sigma == pytest.approx(1.0)
    assert info.tag == CROSSOVER


def test_regime_dilute_critical():
    info = regime_classify(0.5, 1e-3, dim=3)
    assert info.rho <= 0.1
    assert info.tag == DILUTE_CRITICAL


def test_regime_at_eta_one():
    assert regime_classify(0.2, 1.0).tag == SATURATED


def test_regime_errors():
    with pytest.raises(DomainError, match=r"eta must be in \(0,1\]"):
        regime_classify(0.1, 0.0)
    with pytest.raises(DomainError, match="d = 2 or 3"):
        regime_classify(0.1, 0.1, dim=4)


def test_regime_bounds():
    eps, eta = 1.0 / 6.0, 0.2
    assert regime_bounds(regime_classify(eps, eta), eps, eta) == (saturated_bound(eta), None)
    info = regime_classify(0.5, 0.5, dim=3)
    bound, alt = regime_bounds(info, 0.5, 0.5, dim=3)
    assert info.tag == CROSSOVER
    assert bound == pytest.approx(0.25)
    assert alt == pytest.approx(dilute_bound(0.5, 0.5, dim=3))


def test_critical_scales():
    two = critical_scales(0.1)
    assert two["eta_cr1"] == pytest.approx(0.1)
    assert two["eta_cr2"] == pytest.approx(np.exp(-100.0))
    assert two["branch"] == pytest.approx(np.exp(-10.0))
    three = critical_scales(0.25, dim=3)
    assert three == pytest.approx({"eta_cr1": 0.5, "eta_cr2": 0.0625, "branch": 0.25})


def test_rate_sweep_errors():
    config = Config()
    config.sweep.epsilons = []
    with pytest.raises(DomainError, match="empty rate sweep"):
        rate_sweep(config)
    config = Config()
    config.geometry.shape = "sphere:0.25"
    with pytest.raises(UnsupportedError, match="d = 2"):
        rate_sweep(config)


def test_solve_instance_rejects_anisotropic_hole(ellipse, green):
    with pytest.raises(UnsupportedError, match="square-symmetric"):
        solve_instance(ellipse, 0.5, 0.3, green=green, f=SOURCE)


@pytest.mark.slow
def test_small_instance(green):
    """Nine holes at ε = 0.5, η = 0.2 on the unit disk."""
    instance = solve_instance(
        circle_shape(0.25, 64), 0.5, 0.2, green=green, f=SOURCE,
        radial_samples=12, angular_samples=48,
    )
    assert instance.problem.n_holes == 9
    assert instance.full.residual() < 1e-6
    table = instance.field_table()
    assert tuple(table.columns) == FIELD_COLUMNS
    assert len(table.rows) == len(instance.grid.points)
    summary = table.summary
    assert summary["n_holes"] == 9
    assert summary["n_unknowns"] == instance.full.n_unknowns
    assert 0 < summary["a_bar"] < 1
    assert np.isfinite(summary["zeta_norm"])
    assert summary["excluded_annulus"] > 0


@pytest.mark.slow
def test_rate_sweep_rows():
    config = Config()
    config.sweep.epsilons = [0.5]
    config.sweep.etas = [0.3, 0.2]
    config.geometry.n_nodes = 64
    config.disk.radial_samples = 12
    config.disk.angular_samples = 48
    report = rate_sweep(config)
    assert [r.eta for r in report.rows] == [0.3, 0.2]
    assert all(r.regime in (SATURATED, CROSSOVER, DILUTE_CRITICAL) for r in report.rows)
    assert "0.5" in report.slopes
    table = report.to_table()
    assert table.name == "rates"
    assert len(table.rows) == 2


def test_homogenized_reciprocity(circle):
    """Adding a constant c to g shifts ū by exactly c."""
    problem = build_domain(1.0, 0.5, 0.2, circle, f=SOURCE, g={"1,0": 1.0}).without_holes()
    shifted = problem.with_data(problem.f, problem.g + Polynomial2D.constant(0.7))
    tensor = EffectiveTensor(0.2, 0.8 * np.eye(2), "circle:0.25", 64)
    base = solve_homogenized(problem, tensor)
    moved = solve_homogenized(shifted, tensor)
    np.testing.assert_allclose(moved.value(PROBES) - base.value(PROBES), 0.7, atol=1e-10)
    np.testing.assert_allclose(moved.gradient(PROBES), base.gradient(PROBES), atol=1e-10)


def test_corrector_is_cell_periodic(cell_circle):
    """With linear ū the corrector repeats under x → x + εe₁."""
    eps = 0.25
    problem = build_domain(1.0, eps, 0.2, cell_circle.shape, g={"1,0": 1.0})
    hom = solve_homogenized(problem, effective(cell_circle))
    corrector = corrector_field(cell_circle, hom, eps)
    pts = np.array([[0.11, 0.07], [-0.32, 0.4], [0.05, -0.41]])
    shifted = pts + np.array([eps, 0.0])
    np.testing.assert_allclose(corrector.value(shifted), corrector.value(pts), atol=1e-9)
    np.testing.assert_allclose(corrector.gradient(shifted), corrector.gradient(pts), atol=1e-9)


def test_maximum_principle_with_holes(circle):
    """f = 0: u^ε on the sampling grid stays within the range of g on ∂Ω."""
    g = {"2,0": 1.0, "0,2": -1.0, "1,0": 0.5}
    problem = build_domain(1.0, 0.5, 0.2, circle, g=g, hole_nodes=32)
    assert problem.n_holes == 9
    full = solve_full(problem)
    boundary = problem.g(full.outer.points)
    values = full.value(sampling_grid(full, 12, 48).points)
    assert values.min() >= boundary.min() - 1e-8
    assert values.max() <= boundary.max() + 1e-8


@pytest.mark.slow
def test_field_probes_are_resolution_independent(circle):
    """Doubling hole and boundary nodes moves u^ε at interior probes by at most 1e-7."""
    probes = np.array([[0.25, 0.1], [-0.3, 0.2], [0.1, -0.35], [0.7, -0.1]])
    values = []
    for scale in (1, 2):
        problem = build_domain(
            1.0, 0.5, 0.2, circle, f=SOURCE, boundary_nodes=256 * scale, hole_nodes=32 * scale
        )
        values.append(solve_full(problem).value(probes))
    assert np.max(np.abs(values[1] - values[0])) <= 1e-7


@pytest.mark.slow
def test_repeated_instances_are_identical(green):
    """Two solves of the same instance produce the same field table and CSV text."""
    tables = [
        solve_instance(
            circle_shape(0.25, 64), 0.5, 0.2, green=green, f=SOURCE,
            radial_samples=12, angular_samples=48,
        ).field_table()
        for _ in range(2)
    ]
    assert tables[0].rows == tables[1].rows
    assert tables[0].summary == tables[1].summary
    reporter = CSVReporter({"command": "solve", "config": Config().to_dict()})
    assert reporter.render(tables[0]) == reporter.render(tables[1])


@pytest.mark.slow
def test_homogenized_gradient_gap_scales_like_eta_squared(circle, green):
    """‖∇(ū^η − u)‖/η² stays within a factor 2 over η = 0.3, 0.2, 0.1."""
    grid = disk_sampling_grid(1.0, 16, 64, boundary_annulus=0.1)
    ratios = []
    for eta in (0.3, 0.2, 0.1):
        problem = build_domain(1.0, 0.5, eta, circle, f=SOURCE).without_holes()
        tensor = effective(solve_cell(circle, eta, green=green))
        hom = solve_homogenized(problem, tensor)
        plain = solve_homogenized(problem)
        ratios.append(homogenized_gradient_gap(hom, plain, grid) / eta**2)
    assert ratio_spread(ratios) <= 2.0


@pytest.fixture(scope="module")
def sixth_sweep():
    """Rate sweep at ε = 1/6 over η = 0.3, 0.2, 0.1 for the circle with f = 4, g = 0."""
    config = Config()
    config.sweep.epsilons = [1.0 / 6.0]
    config.sweep.etas = [0.3, 0.2, 0.1]
    config.geometry.n_nodes = 64
    return rate_sweep(config)


@pytest.mark.slow
def test_unperforated_gap_scales_like_eta(sixth_sweep):
    """‖u^ε − u‖/η^{d/2} stays within a factor 3."""
    assert ratio_spread([r.uu_norm / r.eta for r in sixth_sweep.rows]) <= 3.0


@pytest.mark.slow
def test_saturated_discrepancy_ratio(sixth_sweep):
    """Rows follow the ρ ≥ 10 rule and ‖ζ^ε‖/η^{d−1} spreads by at most 3."""
    for row in sixth_sweep.rows:
        info = regime_classify(row.epsilon, row.eta)
        assert row.regime == info.tag
        assert (row.regime == SATURATED) == (info.rho >= 10.0)
    saturated = sixth_sweep.rows_in(SATURATED)
    assert len(saturated) == 3
    assert ratio_spread([r.zeta_norm / r.eta for r in saturated]) <= 3.0
    assert sixth_sweep.spreads[SATURATED] <= 3.0
