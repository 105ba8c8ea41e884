from __future__ import annotations

import dataclasses
import functools
import math
import typing

import numpy as np
from dependency_injector.wiring import Provide, inject

from nematiclab.common.exceptions import ComponentCountError, GridMismatchError
from nematiclab.config.setup import ServiceName
from nematiclab.domain.grid import Grid
from nematiclab.services.fft import SpectralBackend
from nematiclab.spectral.kernels import ComplexArray, RealArray


@inject
def forward_transform(
    values: RealArray, dim: int, backend: SpectralBackend = Provide[ServiceName.SPECTRAL_BACKEND]
) -> ComplexArray:
    """
    Forward FFT over the trailing ``dim`` axes through the wired backend.

    :param values: Real array of shape (..., *spatial).
    :param dim: Spatial dimension.
    :return: Fourier coefficients of the same shape.
    """
    return backend.forward(values, dim)


@inject
def inverse_transform(
    coefficients: ComplexArray, dim: int, backend: SpectralBackend = Provide[ServiceName.SPECTRAL_BACKEND]
) -> RealArray:
    """
    Inverse FFT over the trailing ``dim`` axes through the wired backend, real part kept.
    """
    return backend.inverse(coefficients, dim)


def pointwise_magnitude(values: RealArray, dim: int) -> RealArray:
    """Euclidean magnitude over the component axis of an array shaped (..., c, *spatial)."""
    return np.sqrt(np.sum(values**2, axis=-(dim + 1)))


def lp_norm(values: RealArray, grid: Grid, p: float) -> RealArray | float:
    """
    Grid quadrature of the L^p norm of the pointwise Euclidean magnitude.

    :param values: Array of shape (..., c, *spatial); leading axes are kept.
    :param grid: The grid of the values.
    :param p: Exponent in [1, ∞]; ∞ is the grid maximum.
    :return: Norms with the leading axes of ``values``.
    """
    magnitude = pointwise_magnitude(values, grid.dim)
    spatial_axes = tuple(range(-grid.dim, 0))
    if math.isinf(p):
        return np.max(magnitude, axis=spatial_axes)  # type: ignore[no-any-return]
    integral = np.sum(magnitude**p, axis=spatial_axes) * grid.cell_volume
    return integral ** (1.0 / p)  # type: ignore[no-any-return]


@dataclasses.dataclass(frozen=True, eq=False)
class SpectralField:
    """
    Real scalar or vector field on a periodic grid with a lazily computed Fourier representation.

    :ivar grid: The grid the field lives on.
    :ivar values: Read-only array of shape (c, M, ..., M).
    """

    grid: Grid
    values: RealArray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64)
        if values.shape == self.grid.shape:
            values = values[np.newaxis]
        if values.ndim != self.grid.dim + 1 or values.shape[1:] != self.grid.shape:
            raise ComponentCountError(f"Values of shape {values.shape} do not fit grid shape {self.grid.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("Field values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @functools.cached_property
    def fourier(self) -> ComplexArray:
        coefficients = forward_transform(self.values, self.grid.dim)
        coefficients.setflags(write=False)
        return coefficients

    @classmethod
    def from_fourier(cls, grid: Grid, coefficients: ComplexArray) -> SpectralField:
        return cls(grid=grid, values=inverse_transform(coefficients, grid.dim))

    @classmethod
    def zeros(cls, grid: Grid, components: int = 1) -> SpectralField:
        return cls(grid=grid, values=np.zeros((components, *grid.shape)))

    @classmethod
    def constant(cls, grid: Grid, vector: typing.Sequence[float]) -> SpectralField:
        column = np.asarray(vector, dtype=np.float64)[(...,) + (np.newaxis,) * grid.dim]
        values = np.broadcast_to(column, (len(vector), *grid.shape))
        return cls(grid=grid, values=values)

    @classmethod
    def stack(cls, fields: typing.Sequence[SpectralField]) -> SpectralField:
        """Concatenate the components of several fields sharing a grid."""
        grid = fields[0].grid
        for field in fields[1:]:
            field.require_same_grid(grid)
        return cls(grid=grid, values=np.concatenate([field.values for field in fields]))

    @property
    def components(self) -> int:
        return int(self.values.shape[0])

    def component(self, index: int) -> SpectralField:
        return SpectralField(grid=self.grid, values=self.values[index : index + 1])

    def require_same_grid(self, grid: Grid) -> None:
        if grid != self.grid:
            raise GridMismatchError(f"Field grid {self.grid} differs from {grid}")

    def require_components(self, count: int) -> None:
        if self.components != count:
            raise ComponentCountError(f"Expected {count} component(s), got {self.components}")

    def mean(self) -> RealArray:
        """Spatial mean of every component."""
        return np.mean(self.values, axis=tuple(range(1, self.grid.dim + 1)))  # type: ignore[no-any-return]

    def without_mean(self) -> SpectralField:
        return SpectralField(grid=self.grid, values=self.values - self.mean()[(...,) + (np.newaxis,) * self.grid.dim])

    def norm(self, p: float = 2.0) -> float:
        return float(lp_norm(self.values, self.grid, p))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def _coerce(self, other: SpectralField | float) -> RealArray | float:
        if isinstance(other, SpectralField):
            other.require_same_grid(self.grid)
            return other.values
        return other

    def __add__(self, other: SpectralField | float) -> SpectralField:
        return SpectralField(grid=self.grid, values=self.values + self._coerce(other))

    def __sub__(self, other: SpectralField | float) -> SpectralField:
        return SpectralField(grid=self.grid, values=self.values - self._coerce(other))

    def __mul__(self, other: SpectralField | float) -> SpectralField:
        return SpectralField(grid=self.grid, values=self.values * self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self) -> SpectralField:
        return SpectralField(grid=self.grid, values=-self.values)
