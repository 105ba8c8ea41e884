"""
Duhamel time convolutions against the heat semigroup.

Every Fourier mode is advanced exactly over each time interval for data that is linear in time on that
interval, so the operators are exact on piecewise-linear sources and free of any stiffness restriction.
"""

import functools
import logging
from enum import StrEnum

import numpy as np

from nematiclab.domain.grid import Grid
from nematiclab.duhamel.series import TimeSeriesField
from nematiclab.spectral import kernels
from nematiclab.spectral.field import SpectralField
from nematiclab.spectral.kernels import ComplexArray, RealArray

SERIES_SWITCH = 1e-3


class DuhamelOperator(StrEnum):
    A = "A"
    B = "B"
    C = "C"


def interval_weights(rates: RealArray, step: float) -> tuple[RealArray, RealArray, RealArray]:
    """
    Exact per-mode weights of one interval of length Δ.

    :param rates: Decay rates μ ≥ 0 of every mode.
    :param step: Interval length Δ.
    :return: e^{−μΔ}, φ1 = ∫₀^Δ e^{−μσ}dσ and φ2/Δ with φ2 = ∫₀^Δ σe^{−μσ}dσ.
    """
    x = rates * step
    small = x < SERIES_SWITCH
    decay = np.exp(-x)
    with np.errstate(divide="ignore", invalid="ignore"):
        phi1 = np.where(
            small,
            step * (1.0 - x / 2.0 + x**2 / 6.0 - x**3 / 24.0 + x**4 / 120.0),
            -np.expm1(-x) / rates,
        )
        phi2 = np.where(
            small,
            step**2 * (0.5 - x / 3.0 + x**2 / 8.0 - x**3 / 30.0 + x**4 / 144.0),
            (-np.expm1(-x) - x * decay) / rates**2,
        )
    return decay, phi1, phi2 / step


@functools.lru_cache(maxsize=64)
def _cached_weights(grid: Grid, diffusivity: float, step: float) -> tuple[RealArray, RealArray, RealArray]:
    weights = interval_weights(diffusivity * kernels.wavenumber_squared(grid), step)
    for array in weights:
        array.setflags(write=False)
    return weights


def convolution_hat(
    source: ComplexArray,
    grid: Grid,
    times: RealArray,
    diffusivity: float = 1.0,
    initial: ComplexArray | None = None,
) -> ComplexArray:
    """
    Fourier coefficients of e^{ν(t−t_0)Δ}g + ∫_{t_0}^t e^{ν(t−s)Δ}f(s)ds at every time level.

    :param source: Coefficients of f, shape (K + 1, c, M, ..., M).
    :param grid: The spatial grid.
    :param times: The K + 1 time levels.
    :param diffusivity: The factor ν.
    :param initial: Coefficients of g, shape (c, M, ..., M); zero when omitted.
    :return: Coefficients of the result, same shape as ``source``.
    """
    result = np.empty(source.shape, dtype=np.complex128)
    current = np.zeros(source.shape[1:], dtype=np.complex128) if initial is None else np.array(initial)
    result[0] = current
    steps = np.diff(times)
    if steps.size and np.allclose(steps, steps[0], rtol=1e-12, atol=0.0):
        steps = np.full_like(steps, steps[0])
    for k, step in enumerate(steps):
        decay, phi1, phi2_over_step = _cached_weights(grid, float(diffusivity), float(step))
        current = decay * current + phi1 * source[k + 1] - phi2_over_step * (source[k + 1] - source[k])
        result[k + 1] = current
    return result


def exponential_convolution(
    f: TimeSeriesField, diffusivity: float = 1.0, initial: SpectralField | None = None
) -> TimeSeriesField:
    """
    Mild solution of ∂_t w = νΔw + f with w(t_0) = ``initial`` (zero by default).

    :param f: Source on the time grid of the result.
    :param diffusivity: The factor ν.
    :param initial: Optional initial value.
    :return: The solution at every time level of ``f``.
    """
    coefficients = convolution_hat(
        f.fourier, f.grid, f.times, diffusivity, None if initial is None else initial.fourier
    )
    return TimeSeriesField.from_fourier(f.grid, f.times, coefficients)


def op_A(f: TimeSeriesField) -> TimeSeriesField:
    """𝓐f(t) = ∫₀^t Δe^{(t−s)Δ}f(s)ds."""
    convolved = convolution_hat(f.fourier, f.grid, f.times)
    return TimeSeriesField.from_fourier(f.grid, f.times, kernels.laplacian_hat(convolved, f.grid))


def op_B(f: TimeSeriesField) -> TimeSeriesField:
    """𝓑f(t) = ∫₀^t ∇e^{(t−s)Δ}f(s)ds; c input components give N·c output components."""
    convolved = convolution_hat(f.fourier, f.grid, f.times)
    return TimeSeriesField.from_fourier(f.grid, f.times, kernels.gradient_hat(convolved, f.grid))


def op_C(f: TimeSeriesField) -> TimeSeriesField:
    """𝓒f(t) = ∫₀^t e^{(t−s)Δ}f(s)ds."""
    return exponential_convolution(f)


OPERATORS = {
    DuhamelOperator.A: op_A,
    DuhamelOperator.B: op_B,
    DuhamelOperator.C: op_C,
}


def apply_operator(operator: DuhamelOperator, f: TimeSeriesField) -> TimeSeriesField:
    logging.debug(f"[DUHAMEL] Applying {operator} over {f.levels} levels")
    return OPERATORS[operator](f)
