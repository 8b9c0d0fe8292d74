"""
Unit tests for layer potentials, Nyström operators and the Neumann series.
"""

import numpy as np
import pytest

from dilutehom.core.errors import AccuracyWarning, DomainError, SeriesDivergenceError, SolverError, UnsupportedError
from dilutehom.geometry.curves import make_sphere
from dilutehom.green.torus import GreenEta
from dilutehom.potentials.evaluation import BoundaryEvaluator, eval_grad_potential, eval_potential, layer_matrix
from dilutehom.potentials.nystrom import (
    BoundaryDensity,
    DenseSystem,
    OperatorKind,
    assemble_free,
    assemble_periodic,
    assemble_q,
    second_kind,
)
from dilutehom.potentials.series import NeumannSeries, neumann_series_inverse, neumann_series_terms
from dilutehom.utils.fitting import loglog_slope


RADIUS = 0.25
FAR = np.array([[0.5, 0.3], [-0.4, 0.45], [0.1, -0.6]])


def _angle(shape):
    return np.arctan2(shape.points[:, 1], shape.points[:, 0])


def test_gauss_identity_on_boundary(circle, ellipse):
    """K[1] = ½ at every node."""
    for shape in (circle, ellipse):
        k_one = assemble_free(shape, OperatorKind.K).apply(np.ones(shape.n_nodes))
        np.testing.assert_allclose(k_one, 0.5, atol=1e-10)


def test_double_layer_jump(circle):
    """D[1] is 1 inside and 0 outside."""
    ones = np.ones(circle.n_nodes)
    inside = eval_potential(circle, ones, "D", [[0.05, 0.02], [-0.1, 0.12]])
    outside = eval_potential(circle, ones, "D", FAR)
    np.testing.assert_allclose(inside, 1.0, atol=1e-10)
    np.testing.assert_allclose(outside, 0.0, atol=1e-10)


def test_single_layer_of_constant(circle):
    """S[1] = a log a on and inside the circle, a log|x| outside."""
    ones = np.ones(circle.n_nodes)
    on = assemble_free(circle, OperatorKind.S).apply(ones)
    np.testing.assert_allclose(on, RADIUS * np.log(RADIUS), atol=1e-10)
    inside = eval_potential(circle, ones, "S", [[0.05, -0.1]])
    assert inside[0] == pytest.approx(RADIUS * np.log(RADIUS), abs=1e-10)
    outside = eval_potential(circle, ones, "S", FAR)
    np.testing.assert_allclose(outside, RADIUS * np.log(np.linalg.norm(FAR, axis=1)), atol=1e-10)


def test_single_layer_of_cosine(circle):
    """S[cos t] = −a² cos θ / (2r) outside the circle."""
    density = np.cos(_angle(circle))
    r = np.linalg.norm(FAR, axis=1)
    theta = np.arctan2(FAR[:, 1], FAR[:, 0])
    expected = -RADIUS**2 * np.cos(theta) / (2.0 * r)
    np.testing.assert_allclose(eval_potential(circle, density, "S", FAR), expected, atol=1e-10)


def test_free_single_layer_symmetric_on_circle(circle):
    """Equal weights make the circle's S matrix symmetric."""
    s = assemble_free(circle, OperatorKind.S).matrix
    np.testing.assert_allclose(s, s.T, atol=1e-12)


def test_gradient_matches_finite_differences(circle):
    h = 1e-5
    density = np.cos(_angle(circle)) + 0.3 * np.sin(2 * _angle(circle))
    for kind in ("S", "D"):
        grad = eval_grad_potential(circle, density, kind, FAR)
        fd = np.column_stack([
            (eval_potential(circle, density, kind, FAR + [h, 0])
             - eval_potential(circle, density, kind, FAR - [h, 0])) / (2 * h),
            (eval_potential(circle, density, kind, FAR + [0, h])
             - eval_potential(circle, density, kind, FAR - [0, h])) / (2 * h),
        ])
        np.testing.assert_allclose(grad, fd, atol=1e-8)


def test_hessian_is_traceless(circle):
    """Layer potentials are harmonic off the boundary."""
    density = np.cos(_angle(circle))
    evaluator = BoundaryEvaluator(circle)
    for hess in (evaluator.hessian_single_layer(density, FAR), evaluator.hessian_double_layer(density, FAR)):
        np.testing.assert_allclose(np.trace(hess, axis1=1, axis2=2), 0.0, atol=1e-10)
        np.testing.assert_allclose(hess, np.swapaxes(hess, 1, 2), atol=1e-12)


def test_near_boundary_upsampling(circle):
    """Targets inside the guard band are refined until D[1] is accurate again."""
    evaluator = BoundaryEvaluator(circle)
    near = np.array([[RADIUS - 0.01, 0.0], [0.0, RADIUS + 0.01]])
    factors = evaluator.upsample_factors(0, near)
    assert np.all(factors > 1)
    values = evaluator.double_layer(np.ones(circle.n_nodes), near)
    np.testing.assert_allclose(values, [1.0, 0.0], atol=1e-6)


def test_far_targets_are_not_upsampled(circle):
    evaluator = BoundaryEvaluator(circle)
    np.testing.assert_array_equal(evaluator.upsample_factors(0, FAR), 1)


def test_accuracy_warning_when_upsampling_capped(circle):
    evaluator = BoundaryEvaluator(circle, max_upsample=1)
    with pytest.warns(AccuracyWarning):
        evaluator.double_layer(np.ones(circle.n_nodes), [[RADIUS - 1e-3, 0.0]])


def test_layer_matrix_matches_quadrature(circle):
    """The dense plain-quadrature matrix reproduces far-field sums."""
    density = np.sin(_angle(circle))
    evaluator = BoundaryEvaluator(circle)
    np.testing.assert_allclose(
        layer_matrix("S", circle, FAR) @ density, evaluator.single_layer(density, FAR), atol=1e-12
    )
    np.testing.assert_allclose(
        layer_matrix("D", circle, FAR) @ density, evaluator.double_layer(density, FAR), atol=1e-12
    )
    grad = np.einsum("mnd,n->md", layer_matrix("S", circle, FAR, order=1), density)
    np.testing.assert_allclose(grad, evaluator.grad_single_layer(density, FAR), atol=1e-12)


def test_potential_errors(circle):
    ones = np.ones(circle.n_nodes)
    with pytest.raises(DomainError, match="unknown potential kind"):
        eval_potential(circle, ones, "T", FAR)
    with pytest.raises(DomainError, match="needs a GreenEta"):
        eval_potential(circle, ones, "Sp_eta", FAR)
    with pytest.raises(DomainError, match="density needs 64 values"):
        eval_potential(circle, np.ones(10), "S", FAR)
    with pytest.raises(DomainError, match="unknown layer kind"):
        layer_matrix("T", circle, FAR)


def test_periodic_single_layer_adds_smooth_part(circle, green):
    """S^η_p − S equals the quadrature of the smooth perturbation."""
    eta_green = GreenEta(0.2, green)
    density = np.cos(_angle(circle))
    periodic = eval_potential(circle, density, "Sp_eta", FAR, green=eta_green)
    free = eval_potential(circle, density, "S", FAR)
    smooth = eta_green.perturbation(FAR[:, None, :] - circle.points[None, :, :]) @ (circle.weights * density)
    np.testing.assert_allclose(periodic - free, smooth, atol=1e-12)


def test_periodic_operator_splitting(circle, green):
    """K^{η,*}_p = K* + η R2 and S^η_p = S + R1 in d = 2."""
    eta_green = GreenEta(0.2, green)
    kstar = assemble_free(circle, OperatorKind.KSTAR).matrix
    r2 = assemble_periodic(circle, eta_green, OperatorKind.R2).matrix
    kp = assemble_periodic(circle, eta_green, OperatorKind.KSTARP_ETA)
    assert kp.eta == 0.2
    np.testing.assert_allclose(kp.matrix, kstar + 0.2 * r2, atol=1e-13)
    s = assemble_free(circle, OperatorKind.S).matrix
    r1 = assemble_periodic(circle, eta_green, OperatorKind.R1).matrix
    sp = assemble_periodic(circle, eta_green, OperatorKind.SP_ETA).matrix
    np.testing.assert_allclose(sp, s + r1, atol=1e-13)


def test_double_layer_duality(ellipse):
    """K and K* are adjoint under the quadrature inner product."""
    rng = np.random.default_rng(7)
    phi = rng.standard_normal(ellipse.n_nodes)
    psi = rng.standard_normal(ellipse.n_nodes)
    k = assemble_free(ellipse, OperatorKind.K).apply(phi)
    kstar = assemble_free(ellipse, OperatorKind.KSTAR).apply(psi)
    w = ellipse.weights
    assert abs(np.dot(w * k, psi) - np.dot(w * phi, kstar)) < 1e-10


def test_periodic_single_layer_perturbation_order(circle, green):
    """(S^η_p − S − η²Q1)φ shrinks like η⁴ on mean-zero densities."""
    density = np.cos(_angle(circle))
    s = assemble_free(circle, OperatorKind.S).matrix
    q1 = assemble_q(circle, OperatorKind.Q1).matrix
    etas = (0.3, 0.2, 0.15, 0.1)
    gaps = []
    for eta in etas:
        sp = assemble_periodic(circle, GreenEta(eta, green), OperatorKind.SP_ETA).matrix
        gaps.append(float(np.max(np.abs((sp - s - eta**2 * q1) @ density))))
    assert abs(loglog_slope(etas, gaps) - 4.0) <= 0.4


def test_operator_kind_errors(circle, green):
    with pytest.raises(UnsupportedError, match="not a free-space operator"):
        assemble_free(circle, OperatorKind.R1)
    with pytest.raises(UnsupportedError, match="not a periodic operator"):
        assemble_periodic(circle, GreenEta(0.2, green), OperatorKind.K)
    with pytest.raises(UnsupportedError, match="not a quadratic-kernel operator"):
        assemble_q(circle, OperatorKind.S)
    with pytest.raises(UnsupportedError, match="d = 2 only"):
        assemble_free(make_sphere(0.25), OperatorKind.S)


def test_quadratic_kernel_of_constant(circle):
    """Q1[1] = −πa³ on a circle of radius a."""
    q1 = assemble_q(circle, OperatorKind.Q1).apply(np.ones(circle.n_nodes))
    np.testing.assert_allclose(q1, -np.pi * RADIUS**3, atol=1e-12)


def test_boundary_density(circle):
    density = BoundaryDensity(circle, np.ones(circle.n_nodes))
    assert density.integral == pytest.approx(2 * np.pi * RADIUS, rel=1e-12)
    assert density.mean == pytest.approx(1.0, rel=1e-12)
    other = BoundaryDensity(circle, np.zeros(circle.n_nodes))
    assert density.sup_distance(other) == 1.0
    with pytest.raises(DomainError, match="density needs"):
        BoundaryDensity(circle, np.ones(3))


def test_dense_system_solves(circle):
    system = DenseSystem(second_kind(assemble_free(circle, OperatorKind.KSTAR)), "½I + K*")
    rhs = -circle.normals[:, 0]
    x = system.solve(rhs)
    assert system.residual(x, rhs) < 1e-12
    # exterior Neumann density of the circle
    np.testing.assert_allclose(x, 2.0 * rhs, atol=1e-9)


def test_dense_system_failure():
    with pytest.raises(SolverError, match="factorization failed"):
        DenseSystem(np.array([[1.0, np.nan], [0.0, 1.0]]), "broken")


def test_operator_dump_csv(circle, tmp_path):
    op = assemble_free(circle, OperatorKind.K)
    path = tmp_path / "k.csv"
    op.dump_csv(str(path))
    loaded = np.loadtxt(path, delimiter=",")
    assert loaded.shape == (circle.n_nodes, circle.n_nodes)
    np.testing.assert_array_equal(loaded, op.matrix)


def test_series_matches_direct_solve(circle, green):
    eta_green = GreenEta(0.1, green)
    rhs = -circle.normals[:, 0]
    direct = DenseSystem(
        second_kind(assemble_periodic(circle, eta_green, OperatorKind.KSTARP_ETA))
    ).solve(rhs)
    series = NeumannSeries(circle, eta_green)
    np.testing.assert_allclose(series.inverse(rhs, 8), direct, atol=1e-6)
    approx = neumann_series_inverse(series, BoundaryDensity(circle, rhs), 8)
    assert approx.sup_distance(BoundaryDensity(circle, direct)) < 1e-6


def test_series_terms_decay(circle, green):
    """Successive term ratios stay below η^{d−1}."""
    for eta in (0.2, 0.1):
        series = NeumannSeries(circle, GreenEta(eta, green))
        ratios = series.term_ratios(-circle.normals[:, 1], 3)
        assert len(ratios) == 3
        assert ratios[0] <= eta
        predicted = series.predicted_ratio(series.free.solve(-circle.normals[:, 1]))
        assert abs(ratios[0] / predicted - 1.0) < 0.2
        assert all(r < 1.0 for r in ratios)
        norms = neumann_series_terms(series, BoundaryDensity(circle, -circle.normals[:, 1]), 3)
        assert norms == sorted(norms, reverse=True)


def test_series_partial_sums_have_zero_mean(circle, green):
    series = NeumannSeries(circle, GreenEta(0.2, green))
    for partial in series.partial_sums(-circle.normals[:, 0], 3):
        assert abs(float(np.dot(circle.weights, partial))) < 1e-9


def test_series_divergence(circle, green):
    """A growing term aborts the series."""
    blown_up = DenseSystem(1e-8 * np.eye(circle.n_nodes), "scaled identity")
    series = NeumannSeries(circle, GreenEta(0.2, green), free=blown_up)
    with pytest.raises(SeriesDivergenceError, match="Neumann-series radius"):
        series.terms(-circle.normals[:, 0], 2)
