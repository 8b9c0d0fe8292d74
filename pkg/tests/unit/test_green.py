"""
Unit tests for the periodic Green's function.
"""

import numpy as np
import pytest

from dilutehom.core.config import GreenConfig
from dilutehom.core.errors import DomainError, UnsupportedError
from dilutehom.green.torus import (
    GreenEta,
    TorusGreen,
    check_R_expansion,
    fundamental_solution,
    mixed_series_G,
    r0_closed_form,
)


PROBES = np.array([[0.3, 0.2], [0.45, -0.1], [-0.25, 0.4], [0.1, 0.05], [0.5, 0.5]])


def test_r0_regression(green):
    """R(0) matches the Dedekind-eta closed form."""
    assert green.r0 == pytest.approx(r0_closed_form(2), abs=1e-9)
    assert green.r0 == pytest.approx(0.2085778, abs=1e-6)


def test_r0_three_dimensions():
    """Neutralised cubic-lattice constant in d = 3."""
    g3 = TorusGreen(dim=3)
    assert g3.r0 == pytest.approx(r0_closed_form(3), abs=1e-6)


def test_ewald_matches_mixed_series(green):
    """Ewald and the mixed Fourier/image series agree."""
    np.testing.assert_allclose(green.G(PROBES), mixed_series_G(PROBES), atol=1e-9)


def test_splitting_independence(green):
    """G does not depend on the Ewald splitting parameter."""
    other = TorusGreen(splitting=0.5)
    np.testing.assert_allclose(other.G(PROBES), green.G(PROBES), atol=1e-9)


def test_symmetry_and_periodicity(green):
    """G(−x) = G(x) and G(x + e_i) = G(x)."""
    np.testing.assert_allclose(green.G(-PROBES), green.G(PROBES), atol=1e-12)
    np.testing.assert_allclose(green.G(PROBES + [1.0, 0.0]), green.G(PROBES), atol=1e-12)
    np.testing.assert_allclose(green.G(PROBES + [0.0, -2.0]), green.G(PROBES), atol=1e-12)


def test_gradient_matches_finite_differences(green):
    """∇G against central differences."""
    h = 1e-5
    x = np.array([[0.3, 0.2], [-0.2, 0.35]])
    fd = np.column_stack([
        (green.G(x + [h, 0]) - green.G(x - [h, 0])) / (2 * h),
        (green.G(x + [0, h]) - green.G(x - [0, h])) / (2 * h),
    ])
    np.testing.assert_allclose(green.grad_G(x), fd, rtol=1e-6, atol=1e-8)


def test_zero_mean_and_unit_flux(green):
    """∫G = 0 and ∮N·∇G + |B_r| = 1."""
    assert green.mean_value() == pytest.approx(0.0, abs=1e-2)
    assert green.flux_through_circle(0.1) == pytest.approx(1.0, abs=1e-10)


def test_regular_part_expansion(green):
    """Quartic remainder slope ≈ 4 and |x|² coefficient −1/4."""
    fit = check_R_expansion(green, [0.2, 0.1, 0.05, 0.025])
    assert 3.8 <= fit.slope <= 4.2
    assert fit.quadratic_coefficient == pytest.approx(-0.25, abs=1e-3)
    assert fit.r0 == green.r0
    assert len(fit.rows) == 8 * 4


def test_expansion_check_errors(green):
    """Too few radii or radii outside (0, 0.2]."""
    with pytest.raises(DomainError, match="need ≥ 2"):
        check_R_expansion(green, [0.1])
    with pytest.raises(DomainError):
        check_R_expansion(green, [0.3, 0.1])


def test_domain_errors(green):
    """R outside the closed cube and G at lattice points."""
    with pytest.raises(DomainError, match="closed cube"):
        green.R([0.6, 0.0])
    with pytest.raises(DomainError, match="singular"):
        green.G([1.0, 0.0])
    with pytest.raises(DomainError):
        green.G([0.1, 0.2, 0.3])


def test_constructor_validation():
    """Bad dimensions and Ewald parameters."""
    with pytest.raises(UnsupportedError):
        TorusGreen(dim=4)
    with pytest.raises(DomainError):
        TorusGreen(splitting=0.0)
    with pytest.raises(DomainError):
        TorusGreen(real_shells=0)


def test_from_config():
    """The config section maps onto the constructor."""
    g = TorusGreen.from_config(GreenConfig(splitting=0.8, real_shells=4, fourier_cutoff=16))
    assert g.splitting_parameter == 0.8
    assert g.real_space_cutoff == 4
    assert g.fourier_cutoff == 16


def test_green_eta_perturbation(green):
    """G^η − Γ = (1/2π) log η + R(ηx)."""
    ge = GreenEta(0.2, green)
    x = np.array([[0.4, 0.1], [-0.9, 1.2]])
    np.testing.assert_allclose(ge.G(x) - fundamental_solution(x), ge.perturbation(x), atol=1e-12)
    with pytest.raises(DomainError, match=r"eta must be in \(0,1\]"):
        GreenEta(0.0, green)


def test_table_rows(green):
    """Rows carry x, y, G and R."""
    rows = green.table([(0.1, 0.2), (0.25, -0.3)])
    assert len(rows) == 2
    x, y, g, r = rows[0]
    assert (x, y) == (0.1, 0.2)
    assert g == pytest.approx(float(green.G([0.1, 0.2])))
    assert r == pytest.approx(float(green.R([0.1, 0.2])))
