"""
Linear steps of one outer iteration: the director and the velocity of iterate n from iterate n − 1.
Both are mild formulations whose implicit terms are resolved by inner fixed-point sweeps.
"""

import logging

from dependency_injector.wiring import Provide, inject

from nematiclab.config.setup import ServiceName
from nematiclab.domain.grid import PhysicalConstants
from nematiclab.duhamel.operators import convolution_hat
from nematiclab.duhamel.series import TimeSeriesField
from nematiclab.services.sweeps import FixedPointSweeper
from nematiclab.solver.nonlinear import convective, director_stress, gradient_energy
from nematiclab.spectral import kernels
from nematiclab.spectral.field import SpectralField, forward_transform, inverse_transform
from nematiclab.spectral.kernels import ComplexArray, RealArray


def _gradient_values(series: TimeSeriesField) -> RealArray:
    return inverse_transform(kernels.gradient_hat(series.fourier, series.grid), series.grid.dim)


@inject
def director_step(
    d_prev: TimeSeriesField,
    u_prev: TimeSeriesField,
    d0: SpectralField,
    constants: PhysicalConstants,
    sweeper: FixedPointSweeper = Provide[ServiceName.FIXED_POINT_SWEEPER],
) -> TimeSeriesField:
    """
    Director of the next iterate,
    d(t) = e^{γtΔ}d0 + ∫₀^t e^{γ(t−s)Δ}{−u_prev·∇d_prev + γ|∇d_prev|²d}(s)ds,
    with d inside the cubic term found by sweeping.

    :param d_prev: Director of the previous iterate.
    :param u_prev: Velocity of the previous iterate.
    :param d0: Initial director.
    :param constants: Physical constants; γ is used.
    :return: The new director on the time grid of ``d_prev``.
    """
    d_prev.require_aligned(u_prev)
    grid, times, dim = d_prev.grid, d_prev.times, d_prev.grid.dim
    gradient = _gradient_values(d_prev)
    advection = convective(u_prev.values, gradient, dim)
    energy = gradient_energy(gradient, dim)
    gamma = constants.gamma

    def update(values: RealArray) -> RealArray:
        source = kernels.dealias_hat(forward_transform(gamma * energy * values - advection, dim), grid)
        return inverse_transform(convolution_hat(source, grid, times, gamma, d0.fourier), dim)

    outcome = sweeper.solve(update, d_prev.values, "DIRECTOR")
    logging.debug(f"[SOLVER] Director step settled after {outcome.sweeps} sweep(s)")
    return d_prev.with_values(outcome.iterate)


@inject
def velocity_step(
    u_prev: TimeSeriesField,
    d_n: TimeSeriesField,
    a_n: TimeSeriesField,
    grad_pi_prev: TimeSeriesField,
    u0: SpectralField,
    constants: PhysicalConstants,
    sweeper: FixedPointSweeper = Provide[ServiceName.FIXED_POINT_SWEEPER],
) -> tuple[TimeSeriesField, TimeSeriesField]:
    """
    Velocity and pressure gradient of the next iterate.

    The forcing is F = −λ div(∇d_n⊙∇d_n) + a_n(νΔu_prev − ∇Π_prev). The velocity solves
    u(t) = e^{νtΔ}u0 + ∫₀^t e^{ν(t−s)Δ}ℙ{−u_prev·∇u + F}(s)ds by sweeping, and the pressure gradient is
    the gradient part of the same bracket.

    :param u_prev: Velocity of the previous iterate.
    :param d_n: Director of the current iterate.
    :param a_n: Density perturbation of the current iterate.
    :param grad_pi_prev: Pressure gradient of the previous iterate.
    :param u0: Divergence-free initial velocity.
    :param constants: Physical constants; ν and λ are used.
    :return: The new velocity and pressure gradient.
    """
    for series in (d_n, a_n, grad_pi_prev):
        u_prev.require_aligned(series)
    grid, times, dim = u_prev.grid, u_prev.times, u_prev.grid.dim
    nu = constants.nu

    stress_hat = kernels.dealias_hat(forward_transform(director_stress(_gradient_values(d_n), dim), dim), grid)
    elastic_hat = -constants.lambda_ * kernels.divergence_hat(stress_hat, grid)
    viscous_prev = inverse_transform(kernels.laplacian_hat(u_prev.fourier, grid), dim)
    density_hat = kernels.dealias_hat(
        forward_transform(a_n.values * (nu * viscous_prev - grad_pi_prev.values), dim), grid
    )
    forcing_hat = elastic_hat + density_hat

    def bracket_hat(values: RealArray) -> ComplexArray:
        gradient = inverse_transform(kernels.gradient_hat(forward_transform(values, dim), grid), dim)
        return forcing_hat - kernels.dealias_hat(forward_transform(convective(u_prev.values, gradient, dim), dim), grid)

    def update(values: RealArray) -> RealArray:
        projected = kernels.leray_hat(bracket_hat(values), grid)
        return inverse_transform(convolution_hat(projected, grid, times, nu, u0.fourier), dim)

    outcome = sweeper.solve(update, u_prev.values, "VELOCITY")
    pressure = inverse_transform(kernels.gradient_part_hat(bracket_hat(outcome.iterate), grid), dim)
    logging.debug(f"[SOLVER] Velocity step settled after {outcome.sweeps} sweep(s)")
    return u_prev.with_values(outcome.iterate), u_prev.with_values(pressure)
