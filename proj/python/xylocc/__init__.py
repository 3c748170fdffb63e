"""Ground-state entanglement toolkit for transverse-field XY chains."""

from ._core import (
    __version__,
    aqc_schedule_to_g,
    default_alpha_grid,
    ds_dg,
    entanglement_spectrum,
    fermion_block_spectrum,
    fit_exponential,
    ground_state,
    renyi_entropy,
    verdict,
)

__all__ = [
    "__version__",
    "aqc_schedule_to_g",
    "default_alpha_grid",
    "ds_dg",
    "entanglement_spectrum",
    "fermion_block_spectrum",
    "fit_exponential",
    "ground_state",
    "renyi_entropy",
    "verdict",
]
