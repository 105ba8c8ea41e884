from nematiclab.spectral.field import SpectralField, lp_norm
from nematiclab.spectral.operators import (
    dealias,
    derivative,
    divergence,
    gradient,
    heat_semigroup,
    laplacian,
    leray_project,
    riesz_riesz,
)

__all__ = [
    "SpectralField",
    "dealias",
    "derivative",
    "divergence",
    "gradient",
    "heat_semigroup",
    "laplacian",
    "leray_project",
    "lp_norm",
    "riesz_riesz",
]
