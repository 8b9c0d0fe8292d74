"""
Hole geometry: closed curves, model holes and volume quadrature.
"""

from .curves import (
    ClosedCurve,
    HoleShape,
    boundary_integral,
    circle_shape,
    make_circle,
    make_ellipse,
    make_sphere,
    parse_shape,
)

__all__ = [
    "ClosedCurve",
    "HoleShape",
    "boundary_integral",
    "circle_shape",
    "make_circle",
    "make_ellipse",
    "make_sphere",
    "parse_shape",
]
