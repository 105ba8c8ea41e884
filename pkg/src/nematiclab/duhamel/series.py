"""
Time series of spectral fields and their mixed space-time norms.
"""

from __future__ import annotations

import dataclasses
import functools
import math
import typing

import numpy as np

from nematiclab.common.exceptions import (
    ComponentCountError,
    EmptyTimeSeriesError,
    GridMismatchError,
    TimeGridMismatchError,
    WeightSingularityError,
)
from nematiclab.domain.grid import Grid
from nematiclab.spectral.field import SpectralField, forward_transform, inverse_transform, lp_norm
from nematiclab.spectral.kernels import ComplexArray, RealArray


@dataclasses.dataclass(frozen=True, eq=False)
class TimeSeriesField:
    """
    Field sampled on an increasing time grid, stored as one array of shape (K + 1, c, M, ..., M).

    :ivar grid: Spatial grid shared by every time level.
    :ivar times: Strictly increasing nonnegative times t_0 < ... < t_K.
    :ivar values: Read-only field values.
    """

    grid: Grid
    times: RealArray
    values: RealArray

    def __post_init__(self) -> None:
        times = np.array(self.times, dtype=np.float64).reshape(-1)
        if times.size == 0:
            raise EmptyTimeSeriesError("A time series needs at least one time level")
        if not np.all(np.isfinite(times)) or times[0] < 0.0 or np.any(np.diff(times) <= 0.0):
            raise TimeGridMismatchError("Times must be finite, nonnegative and strictly increasing")
        values = np.array(self.values, dtype=np.float64)
        if values.shape[:1] != times.shape or values.shape[2:] != self.grid.shape or values.ndim != self.grid.dim + 2:
            raise ComponentCountError(f"Values of shape {values.shape} do not fit {times.size} levels on {self.grid}")
        if not np.all(np.isfinite(values)):
            raise ValueError("Time series values must be finite")
        times.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_fields(
        cls, times: typing.Sequence[float] | RealArray, fields: typing.Sequence[SpectralField]
    ) -> TimeSeriesField:
        if not fields:
            raise EmptyTimeSeriesError("A time series needs at least one field")
        grid = fields[0].grid
        for field in fields[1:]:
            field.require_same_grid(grid)
        return cls(grid=grid, times=np.asarray(times), values=np.stack([field.values for field in fields]))

    @classmethod
    def from_fourier(cls, grid: Grid, times: RealArray, coefficients: ComplexArray) -> TimeSeriesField:
        return cls(grid=grid, times=times, values=inverse_transform(coefficients, grid.dim))

    @classmethod
    def constant(cls, times: typing.Sequence[float] | RealArray, field: SpectralField) -> TimeSeriesField:
        levels = np.asarray(times, dtype=np.float64)
        values = np.broadcast_to(field.values, (levels.size, *field.values.shape))
        return cls(grid=field.grid, times=levels, values=values)

    @classmethod
    def zeros(cls, grid: Grid, times: typing.Sequence[float] | RealArray, components: int = 1) -> TimeSeriesField:
        levels = np.asarray(times, dtype=np.float64)
        return cls(grid=grid, times=levels, values=np.zeros((levels.size, components, *grid.shape)))

    @functools.cached_property
    def fourier(self) -> ComplexArray:
        coefficients = forward_transform(self.values, self.grid.dim)
        coefficients.setflags(write=False)
        return coefficients

    @property
    def components(self) -> int:
        return int(self.values.shape[1])

    @property
    def levels(self) -> int:
        return int(self.times.size)

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    @property
    def uniform(self) -> bool:
        steps = np.diff(self.times)
        return steps.size == 0 or bool(np.allclose(steps, steps[0], rtol=1e-12, atol=0.0))

    @property
    def fields(self) -> tuple[SpectralField, ...]:
        return tuple(self.at(k) for k in range(self.levels))

    def at(self, k: int) -> SpectralField:
        return SpectralField(grid=self.grid, values=self.values[k])

    def component(self, index: int) -> TimeSeriesField:
        return TimeSeriesField(grid=self.grid, times=self.times, values=self.values[:, index : index + 1])

    def with_values(self, values: RealArray) -> TimeSeriesField:
        return TimeSeriesField(grid=self.grid, times=self.times, values=values)

    def map_fourier(self, multiplier: typing.Callable[[ComplexArray, Grid], ComplexArray]) -> TimeSeriesField:
        """Apply a Fourier-side kernel such as :func:`nematiclab.spectral.kernels.gradient_hat` to every level."""
        return TimeSeriesField.from_fourier(self.grid, self.times, multiplier(self.fourier, self.grid))

    def require_aligned(self, other: TimeSeriesField) -> None:
        if other.grid != self.grid:
            raise GridMismatchError(f"Series grids differ: {self.grid} and {other.grid}")
        if other.times.shape != self.times.shape or not np.allclose(other.times, self.times, rtol=1e-12, atol=1e-15):
            raise TimeGridMismatchError("Series time grids differ")

    def spatial_norms(self, p: float) -> RealArray:
        """Grid L^p norm of every time level."""
        return np.atleast_1d(np.asarray(lp_norm(self.values, self.grid, p)))

    def _coerce(self, other: TimeSeriesField | float) -> RealArray | float:
        if isinstance(other, TimeSeriesField):
            self.require_aligned(other)
            return other.values
        return other

    def __add__(self, other: TimeSeriesField | float) -> TimeSeriesField:
        return self.with_values(self.values + self._coerce(other))

    def __sub__(self, other: TimeSeriesField | float) -> TimeSeriesField:
        return self.with_values(self.values - self._coerce(other))

    def __mul__(self, other: TimeSeriesField | float) -> TimeSeriesField:
        return self.with_values(self.values * self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self) -> TimeSeriesField:
        return self.with_values(-self.values)


def concatenate_components(series: typing.Sequence[TimeSeriesField]) -> TimeSeriesField:
    """Join the components of aligned series, e.g. (u, ∇d) into one carrier for a mixed norm."""
    first = series[0]
    for other in series[1:]:
        first.require_aligned(other)
    return first.with_values(np.concatenate([item.values for item in series], axis=1))


def time_lebesgue(samples: RealArray, times: RealArray, r: float) -> float:
    """Trapezoid L^r norm in time of nonnegative samples; r = ∞ is the maximum."""
    if math.isinf(r):
        return float(np.max(samples)) if samples.size else 0.0
    if times.size < 2:
        return 0.0
    return float(np.trapezoid(samples**r, x=times) ** (1.0 / r))


def lebesgue_norm(f: TimeSeriesField, p: float, r: float) -> float:
    """‖f‖_{L^r_t L^p_x} with the trapezoid rule in time."""
    return time_lebesgue(f.spatial_norms(p), f.times, r)


def weighted_norm(f: TimeSeriesField, weight_exp: float, p: float, r: float) -> float:
    """
    Time-weighted norm ‖t^w f(t)‖_{L^r_t L^p_x}.

    When the series starts at t = 0 with a negative weight, the first interval (0, t_1) is integrated in
    closed form assuming ‖f(t)‖_{L^p} ≈ ‖f(t_1)‖_{L^p} there, which needs w·r > −1.
    For r = ∞ the singular node is dropped when f vanishes there.

    :param f: Series to measure.
    :param weight_exp: Exponent w of the weight t^w.
    :param p: Spatial index.
    :param r: Time index.
    :return: The norm.
    """
    return weighted_time_lebesgue(f.spatial_norms(p), f.times, weight_exp, r)


def weighted_time_lebesgue(norms: RealArray, times: RealArray, weight_exp: float, r: float) -> float:
    """Time part of :func:`weighted_norm` acting on precomputed spatial norms."""
    if weight_exp == 0.0:
        return time_lebesgue(norms, times, r)
    singular = weight_exp < 0.0 and times[0] == 0.0
    if not singular:
        return time_lebesgue(times**weight_exp * norms, times, r)

    if math.isinf(r):
        if norms[0] > 0.0:
            raise WeightSingularityError(f"t^{weight_exp} f(t) is unbounded at t = 0 since f(0) does not vanish")
        return float(np.max(times[1:] ** weight_exp * norms[1:])) if times.size > 1 else 0.0
    power = weight_exp * r
    if power <= -1.0:
        raise WeightSingularityError(f"t^{weight_exp} is not L^{r}-integrable at t = 0")
    if times.size < 2:
        return 0.0
    head = norms[1] ** r * times[1] ** (power + 1.0) / (power + 1.0)
    interior = np.trapezoid((times[1:] ** weight_exp * norms[1:]) ** r, x=times[1:]) if times.size > 2 else 0.0
    return float((head + interior) ** (1.0 / r))
