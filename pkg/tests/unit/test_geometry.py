"""
Unit tests for hole geometry and volume quadrature.
"""

import numpy as np
import pytest

from dilutehom.core.errors import DomainError, GeometryError, UnsupportedError
from dilutehom.geometry.curves import (
    boundary_integral,
    circle_shape,
    make_circle,
    make_ellipse,
    make_sphere,
    parse_shape,
)
from dilutehom.geometry.quadrature import cell_quadrature, disk_sampling_grid


def test_circle_area_perimeter_and_curvature(circle):
    """The trapezoidal rule is exact for the circle's area and length."""
    assert circle.area == pytest.approx(np.pi * 0.25**2, abs=1e-12)
    assert circle.perimeter == pytest.approx(2.0 * np.pi * 0.25, abs=1e-12)
    np.testing.assert_allclose(circle.curvature, 4.0, atol=1e-10)
    np.testing.assert_allclose(circle.weights.sum(), circle.perimeter)


def test_normals_point_out_of_the_hole(circle):
    """N is the outward unit normal of T."""
    radial = np.sum(circle.points * circle.normals, axis=1)
    np.testing.assert_allclose(radial, 0.25, atol=1e-12)
    np.testing.assert_allclose(np.linalg.norm(circle.normals, axis=1), 1.0, atol=1e-12)


def test_ellipse_area(ellipse):
    """Rotated ellipse keeps area πab."""
    assert ellipse.area == pytest.approx(np.pi * 0.2 * 0.1, rel=1e-12)


def test_containment_violation():
    """Holes must lie inside B_{1/3}."""
    with pytest.raises(GeometryError, match="containment"):
        make_circle(0.4)
    with pytest.raises(GeometryError, match="containment"):
        make_ellipse(0.3, 0.1, center=(0.1, 0.0))


def test_odd_node_count_rejected():
    """Node counts must be even."""
    with pytest.raises(GeometryError, match="even"):
        make_circle(0.2, n_nodes=33)


def test_parse_shape_grammar():
    """circle, ellipse, multi and sphere specifications."""
    assert parse_shape("circle:0.25", 32).area == pytest.approx(np.pi / 16, rel=1e-12)
    ell = parse_shape("ellipse:0.2,0.1,0.5", 64)
    assert ell.area == pytest.approx(np.pi * 0.02, rel=1e-12)
    multi = parse_shape("multi:circle:0.08@0.15,0;circle:0.08@-0.15,0", 32)
    assert len(multi.components) == 2
    assert multi.n_nodes == 64
    assert multi.radial_function is None
    sphere = parse_shape("sphere:0.25")
    assert sphere.dim == 3
    assert sphere.area == pytest.approx(4.0 * np.pi * 0.25**3 / 3.0)


def test_parse_shape_errors():
    """Malformed specifications raise GeometryError."""
    with pytest.raises(GeometryError, match="unknown shape"):
        parse_shape("square:0.2")
    with pytest.raises(GeometryError, match="malformed"):
        parse_shape("circle:abc")
    with pytest.raises(GeometryError, match="overlap"):
        parse_shape("multi:circle:0.1@0.05,0;circle:0.1@-0.05,0", 32)
    with pytest.raises(GeometryError, match="center must be"):
        parse_shape("circle:0.1@a,b")
    with pytest.raises(GeometryError, match="violates"):
        parse_shape("sphere:0.5")


def test_component_cap():
    """At most eight components per cell."""
    parts = ";".join(f"circle:0.01@{0.03 * i - 0.12:.2f},0" for i in range(9))
    with pytest.raises(GeometryError, match="at most 8"):
        parse_shape(f"multi:{parts}", 16)


def test_resampling_stays_on_the_curve(circle):
    """Spectral resampling of an exact circle stays on it."""
    fine = circle.with_nodes(256)
    assert fine.n_nodes == 256
    np.testing.assert_allclose(np.hypot(*fine.points.T), 0.25, atol=1e-12)
    assert fine.perimeter == pytest.approx(circle.perimeter, rel=1e-12)


def test_scaled_and_translated(circle):
    """Scaling multiplies the area by s²; translation leaves it unchanged."""
    small = circle.scaled(0.1)
    assert small.area == pytest.approx(circle.area * 0.01, rel=1e-12)
    moved = small.translated((0.5, -0.25))
    assert moved.area == pytest.approx(small.area, rel=1e-12)
    np.testing.assert_allclose(moved.points.mean(axis=0), [0.5, -0.25], atol=1e-12)


def test_rotation_keeps_circle(circle):
    """A rotated circle has the same nodes up to a shift."""
    rotated = circle.rotated(np.pi / 2)
    np.testing.assert_allclose(rotated.points, np.roll(circle.points, -16, axis=0), atol=1e-12)


def test_weight_perturbation(circle):
    """Debug hook scales only the first weight."""
    bumped = circle.with_weight_perturbation(1e-3)
    assert bumped.weights[0] == pytest.approx(circle.weights[0] * 1.001)
    np.testing.assert_array_equal(bumped.weights[1:], circle.weights[1:])


def test_radial_function(circle):
    """r(θ) of the centred circle is constant."""
    radial = circle.radial_function
    np.testing.assert_allclose(radial(np.linspace(0, 6, 7)), 0.25)


def test_boundary_integral(circle):
    """Σ w_i·1 is the perimeter; wrong lengths are rejected."""
    assert boundary_integral(circle, np.ones(64)) == pytest.approx(circle.perimeter)
    with pytest.raises(DomainError):
        boundary_integral(circle, np.ones(10))


def test_sphere_tag():
    """Sphere tags carry no nodes and enforce containment."""
    assert make_sphere(0.2).n_nodes == 0
    with pytest.raises(GeometryError):
        make_sphere(0.5)


def test_cell_quadrature_areas():
    """Hole and fluid rules add up to the rescaled cell."""
    shape = circle_shape(0.25, 64)
    hole, fluid = cell_quadrature(shape.radial_function, 2.5)
    assert hole.area == pytest.approx(np.pi * 0.25**2, rel=1e-12)
    assert hole.area + fluid.area == pytest.approx(25.0, rel=1e-10)


def test_cell_quadrature_needs_radial_description():
    """Multi-component holes have no polar description."""
    with pytest.raises(UnsupportedError):
        cell_quadrature(None, 2.5)


def test_disk_sampling_grid():
    """Area bookkeeping of exclusions and the boundary band."""
    full = disk_sampling_grid(1.0, 16, 64)
    assert full.area == pytest.approx(np.pi, rel=1e-12)
    assert full.excluded_area == pytest.approx(0.0, abs=1e-12)

    cut = disk_sampling_grid(1.0, 16, 64, exclusions=[((0.0, 0.0), 0.3)], boundary_annulus=0.1)
    assert np.all(np.hypot(*cut.points.T) > 0.3)
    assert np.all(np.hypot(*cut.points.T) < 0.9)
    assert cut.excluded_area > np.pi * (1.0 - 0.81)

    with pytest.raises(DomainError, match="empty sampling region"):
        disk_sampling_grid(1.0, 8, 16, boundary_annulus=1.0)
