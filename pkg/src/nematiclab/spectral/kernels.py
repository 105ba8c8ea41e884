"""
Fourier-side multipliers acting on coefficient arrays.

Arrays have shape ``(..., c, M, ..., M)``: any number of leading batch axes (time levels),
one component axis, then the ``dim`` spatial axes. Odd multipliers use the wavevector with its
Nyquist components zeroed; even multipliers use the full squared wavenumber.
"""

import functools

import numpy as np
import numpy.typing as npt

from nematiclab.domain.grid import Grid

ComplexArray = npt.NDArray[np.complexfloating]
RealArray = npt.NDArray[np.float64]


@functools.lru_cache(maxsize=32)
def integer_modes(grid: Grid) -> npt.NDArray[np.int64]:
    """Signed integer mode numbers of every grid frequency, shape (N, M, ..., M)."""
    axis = np.fft.fftfreq(grid.points_per_axis, d=1.0 / grid.points_per_axis).round().astype(np.int64)
    modes = np.stack(np.meshgrid(*([axis] * grid.dim), indexing="ij"))
    modes.setflags(write=False)
    return modes


@functools.lru_cache(maxsize=32)
def wavevector(grid: Grid) -> RealArray:
    """Angular wavevector 2πk/L with Nyquist components zeroed, shape (N, M, ..., M)."""
    nyquist = grid.points_per_axis // 2
    modes = integer_modes(grid)
    vector = np.where(np.abs(modes) == nyquist, 0.0, modes * grid.fundamental_frequency)
    vector.setflags(write=False)
    return vector


@functools.lru_cache(maxsize=32)
def wavenumber_squared(grid: Grid) -> RealArray:
    """Full |2πk/L|², Nyquist included, shape (M, ..., M)."""
    squared = np.sum((integer_modes(grid) * grid.fundamental_frequency) ** 2, axis=0)
    squared.setflags(write=False)
    return squared


@functools.lru_cache(maxsize=32)
def frequency_magnitude(grid: Grid) -> RealArray:
    magnitude = np.sqrt(wavenumber_squared(grid))
    magnitude.setflags(write=False)
    return magnitude


@functools.lru_cache(maxsize=32)
def _inverse_odd_squared(grid: Grid) -> RealArray:
    squared = np.sum(wavevector(grid) ** 2, axis=0)
    inverse = np.divide(1.0, squared, out=np.zeros_like(squared), where=squared > 0.0)
    inverse.setflags(write=False)
    return inverse


@functools.lru_cache(maxsize=32)
def dealias_mask(grid: Grid) -> npt.NDArray[np.bool_]:
    """Two-thirds rule: keep modes with |k_i| < M/3 on every axis."""
    mask = np.all(np.abs(integer_modes(grid)) < grid.points_per_axis / 3.0, axis=0)
    mask.setflags(write=False)
    return mask


def _component_axis(grid: Grid) -> int:
    return -(grid.dim + 1)


def derivative_hat(coefficients: ComplexArray, grid: Grid, axis: int) -> ComplexArray:
    return 1j * wavevector(grid)[axis] * coefficients


def gradient_hat(coefficients: ComplexArray, grid: Grid) -> ComplexArray:
    """
    Gradient of every component. Component ``i * c + j`` of the result is ∂_i f_j.

    :param coefficients: Array of shape (..., c, *spatial).
    :param grid: The grid the coefficients live on.
    :return: Array of shape (..., N * c, *spatial).
    """
    stacked = np.stack(
        [derivative_hat(coefficients, grid, axis) for axis in range(grid.dim)], axis=_component_axis(grid) - 1
    )
    return stacked.reshape(*coefficients.shape[: -(grid.dim + 1)], -1, *grid.shape)


def divergence_hat(coefficients: ComplexArray, grid: Grid) -> ComplexArray:
    """
    Divergence over the leading index: (div M)_j = Σ_i ∂_i M_{ij} for M of shape (..., N * c, *spatial).
    A vector field (c = 1) gives its scalar divergence.
    """
    lead = coefficients.shape[: -(grid.dim + 1)]
    split = coefficients.reshape(*lead, grid.dim, -1, *grid.shape)
    vector = wavevector(grid)
    return sum(  # type: ignore[return-value]
        (1j * vector[axis] * np.take(split, axis, axis=-(grid.dim + 2)) for axis in range(grid.dim)),
        start=np.zeros((), dtype=np.complex128),
    )


def laplacian_hat(coefficients: ComplexArray, grid: Grid) -> ComplexArray:
    return -wavenumber_squared(grid) * coefficients


def heat_hat(coefficients: ComplexArray, grid: Grid, time: float) -> ComplexArray:
    return np.exp(-wavenumber_squared(grid) * time) * coefficients


def gradient_part_hat(coefficients: ComplexArray, grid: Grid) -> ComplexArray:
    """Modewise k(k·f̂)/|k|² for a vector field; the zero mode is dropped."""
    vector = wavevector(grid)
    projection = np.sum(vector * coefficients, axis=_component_axis(grid), keepdims=True)
    return vector * (projection * _inverse_odd_squared(grid))


def leray_hat(coefficients: ComplexArray, grid: Grid) -> ComplexArray:
    """Modewise f̂ − k(k·f̂)/|k|²; modes with vanishing odd wavevector pass through."""
    return coefficients - gradient_part_hat(coefficients, grid)


def dealias_hat(coefficients: ComplexArray, grid: Grid) -> ComplexArray:
    return np.where(dealias_mask(grid), coefficients, 0.0)


def inverse_gradient_hat(coefficients: ComplexArray, grid: Grid) -> ComplexArray:
    """
    Recover a mean-zero potential Π from its gradient: Π̂ = −i k·(∇Π)^ / |k|².

    :param coefficients: Gradient coefficients, shape (..., N, *spatial).
    :return: Potential coefficients, shape (..., 1, *spatial).
    """
    vector = wavevector(grid)
    projection = np.sum(vector * coefficients, axis=_component_axis(grid), keepdims=True)
    return -1j * projection * _inverse_odd_squared(grid)
