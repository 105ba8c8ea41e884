"""
Closed-form values the numerical routines are compared against.
"""

import math

import numpy as np
import scipy.special

from nematiclab.domain.grid import Grid
from nematiclab.spectral.field import SpectralField


def cosine_mode(grid: Grid, mode: tuple[int, ...], amplitude: float = 1.0) -> SpectralField:
    """amplitude · cos(2π k·x/L) as a scalar field."""
    vector = np.asarray(mode, dtype=np.float64) * grid.fundamental_frequency
    return SpectralField(grid=grid, values=amplitude * np.cos(np.tensordot(vector, grid.coordinates(), axes=1)))


def cosine_lp_norm(grid: Grid, p: float, amplitude: float = 1.0) -> float:
    """‖amplitude · cos(k·x)‖_{L^p} over the box for any nonzero integer mode k."""
    if math.isinf(p):
        return abs(amplitude)
    average = scipy.special.gamma((p + 1.0) / 2.0) / (math.sqrt(math.pi) * scipy.special.gamma(p / 2.0 + 1.0))
    return float(abs(amplitude) * (grid.volume * average) ** (1.0 / p))


def heat_l2_norm(grid: Grid, rate: float, amplitude: float = 1.0) -> float:
    """
    (∫₀^∞ ‖e^{tΔ}f‖²_{L²} dt)^{1/2} for a single mode of decay rate |ξ|², which equals the heat characterization
    of the index (−1, 2, 2).
    """
    return cosine_lp_norm(grid, 2.0, amplitude) / math.sqrt(2.0 * rate)


def taylor_green_velocity(grid: Grid, time: float, nu: float = 1.0, amplitude: float = 1.0) -> np.ndarray:
    """(sin x1 cos x2, −cos x1 sin x2) decaying as e^{−2νk²t}, components beyond the second zero."""
    k = grid.fundamental_frequency
    x1, x2 = k * grid.coordinates()[0], k * grid.coordinates()[1]
    values = np.zeros((grid.dim, *grid.shape))
    values[0] = np.sin(x1) * np.cos(x2)
    values[1] = -np.cos(x1) * np.sin(x2)
    return amplitude * math.exp(-2.0 * nu * k**2 * time) * values


def planar_director(grid: Grid, winding: int) -> SpectralField:
    """(cos m x1, sin m x1, 0), a harmonic map to the unit sphere."""
    angle = winding * grid.fundamental_frequency * grid.coordinates()[0]
    values = np.zeros((grid.dim, *grid.shape))
    values[0], values[1] = np.cos(angle), np.sin(angle)
    return SpectralField(grid=grid, values=values)


def taylor_green_pressure_gradient(grid: Grid, time: float, nu: float = 1.0, amplitude: float = 1.0) -> np.ndarray:
    """∇π = −u·∇u = −(sin 2x1, sin 2x2)/2 · amplitude² e^{−4νk²t}, so that the vortex decays like the heat flow."""
    k = grid.fundamental_frequency
    values = np.zeros((grid.dim, *grid.shape))
    for axis in range(2):
        values[axis] = -0.5 * k * np.sin(2.0 * k * grid.coordinates()[axis])
    return amplitude**2 * math.exp(-4.0 * nu * k**2 * time) * values
