"""
Effective tensors, polarization tensors and η sweeps.
"""

from .sweeps import (
    cell_sweep,
    continuity_scan,
    dilute_residual,
    homogenized_gap_bound,
    tensor_sweep,
    tensor_table,
)
from .tensor import (
    effective,
    effective_sphere,
    effective_volume,
    polarization,
    polarization_sphere,
    polarization_volume,
    second_order_coefficient,
    volume_fraction,
)

__all__ = [
    "cell_sweep",
    "continuity_scan",
    "dilute_residual",
    "effective",
    "effective_sphere",
    "effective_volume",
    "homogenized_gap_bound",
    "polarization",
    "polarization_sphere",
    "polarization_volume",
    "second_order_coefficient",
    "tensor_sweep",
    "tensor_table",
    "volume_fraction",
]
