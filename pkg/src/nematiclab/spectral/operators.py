"""
Fourier-multiplier operators on :class:`SpectralField` values.
"""

import logging

import numpy as np

from nematiclab.common.exceptions import AxisOutOfRangeError, ComponentCountError, NegativeTimeError
from nematiclab.spectral import kernels
from nematiclab.spectral.field import SpectralField


def derivative(f: SpectralField, axis: int) -> SpectralField:
    """
    Partial derivative ∂f/∂x_axis through the ik multiplier, Nyquist mode zeroed.

    :param f: Field to differentiate, any number of components.
    :param axis: Spatial axis in [0, N).
    :return: The derivative of every component.
    """
    if not 0 <= axis < f.grid.dim:
        raise AxisOutOfRangeError(f"Axis {axis} is outside [0, {f.grid.dim})")
    return SpectralField.from_fourier(f.grid, kernels.derivative_hat(f.fourier, f.grid, axis))


def gradient(f: SpectralField) -> SpectralField:
    """Gradient of every component; component ``i * c + j`` holds ∂_i f_j."""
    return SpectralField.from_fourier(f.grid, kernels.gradient_hat(f.fourier, f.grid))


def divergence(f: SpectralField) -> SpectralField:
    """
    Divergence over the leading index. A vector field yields a scalar, an N×N field M yields Σ_i ∂_i M_ij.
    """
    if f.components % f.grid.dim:
        raise ComponentCountError(f"Divergence needs a multiple of {f.grid.dim} components, got {f.components}")
    return SpectralField.from_fourier(f.grid, kernels.divergence_hat(f.fourier, f.grid))


def laplacian(f: SpectralField) -> SpectralField:
    return SpectralField.from_fourier(f.grid, kernels.laplacian_hat(f.fourier, f.grid))


def heat_semigroup(f: SpectralField, t: float, diffusivity: float = 1.0) -> SpectralField:
    """
    Heat semigroup e^{tΔ}: every mode scaled by exp(−|2πk/L|² t).

    :param f: Field to evolve.
    :param t: Nonnegative time.
    :param diffusivity: Multiplies t, so that e^{tνΔ} is ``heat_semigroup(f, t, nu)``.
    :return: The evolved field; ``t = 0`` returns ``f`` itself.
    """
    if t < 0.0:
        raise NegativeTimeError(f"Heat semigroup needs t >= 0, got {t}")
    if t == 0.0:
        return f
    return SpectralField.from_fourier(f.grid, kernels.heat_hat(f.fourier, f.grid, t * diffusivity))


def leray_project(v: SpectralField) -> SpectralField:
    """
    Leray projection onto divergence-free fields; the zero mode passes through unchanged.

    :param v: Vector field with N components.
    :return: The projected field, discretely divergence-free.
    """
    if v.components != v.grid.dim:
        raise ComponentCountError(f"Leray projection needs {v.grid.dim} components, got {v.components}")
    return SpectralField.from_fourier(v.grid, kernels.leray_hat(v.fourier, v.grid))


def riesz_riesz(f: SpectralField) -> SpectralField:
    """
    Gradient part RR·f = k(k·f̂)/|k|² of a vector field: the pressure gradient ∇Π with ΔΠ = div f.
    Together with :func:`leray_project` it splits ``f`` exactly.
    """
    if f.components != f.grid.dim:
        raise ComponentCountError(f"Riesz transforms need {f.grid.dim} components, got {f.components}")
    return SpectralField.from_fourier(f.grid, kernels.gradient_part_hat(f.fourier, f.grid))


def dealias(f: SpectralField) -> SpectralField:
    return SpectralField.from_fourier(f.grid, kernels.dealias_hat(f.fourier, f.grid))


def dealiased_product(f: SpectralField, g: SpectralField) -> SpectralField:
    """Pointwise product followed by the two-thirds truncation."""
    return dealias(f * g)


def spectral_divergence_norm(v: SpectralField) -> float:
    """L² norm of div v evaluated from the Fourier side."""
    div_hat = kernels.divergence_hat(v.fourier, v.grid)
    points = v.grid.points_per_axis**v.grid.dim
    norm = float(np.sqrt(np.sum(np.abs(div_hat) ** 2) * v.grid.volume) / points)
    logging.debug(f"[SPECTRAL] Divergence norm {norm:.3e}")
    return norm
