"""
Pytest configuration and fixtures for dilutehom tests.
"""

import pytest

from dilutehom.cell.solver import solve_cell, solve_exterior
from dilutehom.core.config import Config
from dilutehom.geometry.curves import HoleShape, circle_shape, make_ellipse
from dilutehom.green.torus import TorusGreen


@pytest.fixture
def test_config():
    """Provide a test configuration."""
    config = Config()
    config.output.verbose = True
    return config


@pytest.fixture(scope="session")
def green():
    """Default Ewald evaluator on the unit square torus."""
    return TorusGreen()


@pytest.fixture
def circle():
    """Circle of radius 0.25 on 64 nodes."""
    return circle_shape(0.25, 64)


@pytest.fixture
def ellipse():
    """Rotated ellipse with semi-axes 0.2 and 0.1."""
    curve = make_ellipse(0.2, 0.1, rotation=0.3, n_nodes=96)
    return HoleShape(components=(curve,), label="ellipse:0.2,0.1,0.3")


@pytest.fixture(scope="module")
def exterior_circle():
    """Exterior Neumann solution for the reference circle."""
    return solve_exterior(circle_shape(0.25, 64))


@pytest.fixture(scope="module")
def cell_circle(green):
    """Cell solution for the reference circle at η = 0.2."""
    return solve_cell(circle_shape(0.25, 64), 0.2, green=green)
