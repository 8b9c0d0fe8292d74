"""
Periodic Green's function of the Laplacian on the unit torus.
"""

from .torus import (
    GreenEta,
    TorusGreen,
    check_R_expansion,
    eval_G,
    eval_gradG,
    eval_R,
    mixed_series_G,
    r0_closed_form,
)

__all__ = [
    "GreenEta",
    "TorusGreen",
    "check_R_expansion",
    "eval_G",
    "eval_gradG",
    "eval_R",
    "mixed_series_G",
    "r0_closed_form",
]
