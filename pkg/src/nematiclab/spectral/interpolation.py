"""
Periodic cubic-spline interpolation of grid fields at arbitrary points.
"""

import dataclasses

import numpy as np
import scipy.ndimage

from nematiclab.domain.grid import Grid
from nematiclab.spectral.kernels import RealArray

SPLINE_ORDER = 3


@dataclasses.dataclass(frozen=True, eq=False)
class PeriodicInterpolator:
    """
    Cubic B-spline interpolant of every component of a periodic field.
    The spline coefficients are computed once, so repeated evaluations only pay for the stencil.

    :ivar grid: Grid of the interpolated values.
    :ivar coefficients: Prefiltered spline coefficients, shape (c, M, ..., M).
    """

    grid: Grid
    coefficients: RealArray

    @classmethod
    def from_values(cls, values: RealArray, grid: Grid) -> "PeriodicInterpolator":
        values = np.asarray(values, dtype=np.float64)
        if values.ndim == grid.dim:
            values = values[np.newaxis]
        coefficients = np.stack(
            [scipy.ndimage.spline_filter(component, order=SPLINE_ORDER, mode="grid-wrap") for component in values]
        )
        return cls(grid=grid, coefficients=coefficients)

    def __call__(self, points: RealArray) -> RealArray:
        """
        Evaluate at physical positions.

        :param points: Positions of shape (N, ...); any real value, wrapped onto the torus.
        :return: Interpolated values of shape (c, ...).
        """
        indices = np.asarray(points, dtype=np.float64) / self.grid.spacing
        return np.stack(
            [
                scipy.ndimage.map_coordinates(
                    component, indices, order=SPLINE_ORDER, mode="grid-wrap", prefilter=False
                )
                for component in self.coefficients
            ]
        )


def interpolate_periodic(values: RealArray, grid: Grid, points: RealArray) -> RealArray:
    """One-shot evaluation of the cubic interpolant of ``values`` at ``points``."""
    return PeriodicInterpolator.from_values(values, grid)(points)
