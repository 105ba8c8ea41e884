"""
Outer iteration of the scheme: transport, director and velocity steps repeated until the increments vanish.
"""

import logging
import math

import numpy as np
import scipy.integrate
import scipy.optimize

from nematiclab.besov.decomposition import dyadic_multipliers
from nematiclab.besov.norms import smallness_eta, smallness_holds
from nematiclab.common.exceptions import DensityRangeError, SmallnessViolationError
from nematiclab.config.settings.defaults import DENSITY_GUARD, MEAN_ZERO_TOLERANCE
from nematiclab.config.settings.run import SchemeSection
from nematiclab.domain.grid import PhysicalConstants
from nematiclab.domain.reports import IterationReport
from nematiclab.duhamel.series import TimeSeriesField
from nematiclab.solver.ledger import delta_U
from nematiclab.solver.state import Trajectory
from nematiclab.solver.steps import director_step, velocity_step
from nematiclab.solver.transport import transport_trajectory
from nematiclab.spectral import kernels
from nematiclab.spectral.field import SpectralField, pointwise_magnitude
from nematiclab.spectral.kernels import RealArray
from nematiclab.spectral.operators import gradient


def mollify(a0: SpectralField, n: int) -> SpectralField:
    """
    Convolution with a periodic Gaussian of width 1/n, clamped to the range of ``a0``; n = 0 gives the mean.
    """
    if n == 0:
        return SpectralField.constant(a0.grid, a0.mean())
    multiplier = np.exp(-0.5 * kernels.wavenumber_squared(a0.grid) / n**2)
    smoothed = SpectralField.from_fourier(a0.grid, multiplier * a0.fourier)
    return SpectralField(grid=a0.grid, values=np.clip(smoothed.values, a0.values.min(), a0.values.max()))


def frequency_truncation(f: SpectralField, n: int) -> SpectralField:
    """Mean of ``f`` plus its dyadic blocks Δ̇_q f with |q| ≤ n."""
    indices, multipliers = dyadic_multipliers(f.grid)
    kept = np.sum([multiplier for q, multiplier in zip(indices, multipliers, strict=True) if abs(q) <= n], axis=0)
    truncated = SpectralField.from_fourier(f.grid, kept * f.without_mean().fourier)
    return truncated + SpectralField.constant(f.grid, f.mean())


def regularize_data(
    a0: SpectralField, u0: SpectralField, d0: SpectralField, n: int
) -> tuple[SpectralField, SpectralField, SpectralField]:
    """
    Smooth initial data of level ``n``.

    :param a0: Density perturbation, mollified at width 1/n.
    :param u0: Velocity, truncated to the blocks |q| ≤ n.
    :param d0: Director, truncated to the blocks |q| ≤ n around its mean.
    :param n: Regularization level, nonnegative.
    :return: The regularized triple.
    """
    if n < 0:
        raise ValueError(f"Regularization level must be nonnegative, got {n}")
    logging.debug(f"[SOLVER] Regularizing data at level {n}")
    return mollify(a0, n), frequency_truncation(u0, n), frequency_truncation(d0, n)


def uniform_director(d0: SpectralField) -> SpectralField:
    """Constant unit vector along the mean of ``d0``, the first axis when that mean vanishes."""
    direction = d0.mean()
    length = float(np.linalg.norm(direction))
    if length <= MEAN_ZERO_TOLERANCE:
        direction, length = np.eye(d0.components)[0], 1.0
    return SpectralField.constant(d0.grid, list(direction / length))


def initial_iterate(d0: SpectralField, times: RealArray, constants: PhysicalConstants) -> Trajectory:
    """Iterate zero: no density perturbation, velocity or pressure gradient, and a uniform unit director."""
    grid = d0.grid
    zeros = TimeSeriesField.zeros(grid, times, grid.dim)
    return Trajectory(
        a=TimeSeriesField.zeros(grid, times),
        u=zeros,
        d=TimeSeriesField.constant(times, uniform_director(d0)),
        grad_pi=zeros,
        constants=constants,
    )


def normalize_director(d: TimeSeriesField) -> TimeSeriesField:
    magnitude = pointwise_magnitude(d.values, d.grid.dim)[:, np.newaxis]
    return d.with_values(d.values / np.maximum(magnitude, np.finfo(np.float64).tiny))


def director_bound_constant(d_max: float, eta: float) -> float:
    """Smallest C with (1 + Cη)e^{Cη} ≥ d_max."""
    if d_max <= 1.0:
        return 0.0
    if eta == 0.0:
        return math.inf
    root = scipy.optimize.brentq(lambda x: (1.0 + x) * math.exp(x) - d_max, 0.0, math.log(d_max))
    return float(root) / eta


def transport_growth_ratio(a: TimeSeriesField, u_prev: TimeSeriesField, a0: SpectralField) -> float:
    """
    Largest ratio ‖∇a(t)‖_∞ / (‖∇a0‖_∞ exp ∫₀^t ‖∇u_prev‖_∞) over the time grid.
    Zero for a flat a0.
    """
    initial = gradient(a0).norm(math.inf)
    if initial == 0.0:
        return 0.0
    gradient_sup = a.map_fourier(kernels.gradient_hat).spatial_norms(math.inf)
    velocity_sup = u_prev.map_fourier(kernels.gradient_hat).spatial_norms(math.inf)
    budget = np.exp(scipy.integrate.cumulative_trapezoid(velocity_sup, a.times, initial=0.0))
    return float(np.max(gradient_sup / (initial * budget)))


def divergence_profile(u: TimeSeriesField) -> RealArray:
    """Spectral L² norm of div u at every time level."""
    div_hat = kernels.divergence_hat(u.fourier, u.grid)
    points = u.grid.points_per_axis**u.grid.dim
    axes = tuple(range(1, div_hat.ndim))
    return np.sqrt(np.sum(np.abs(div_hat) ** 2, axis=axes) * u.grid.volume) / points  # type: ignore[no-any-return]


def divergence_sup(u: TimeSeriesField) -> float:
    return float(np.max(divergence_profile(u)))


def iteration_monitors(current: Trajectory, previous: Trajectory, a0: SpectralField, eta: float) -> dict[str, float]:
    d_max = float(np.max(current.d.spatial_norms(math.inf)))
    magnitude = pointwise_magnitude(current.d.values, current.grid.dim)
    return {
        "a_max": float(np.max(np.abs(current.a.values))),
        "d_max": d_max,
        "director_bound_C": director_bound_constant(d_max, eta),
        "grad_a_growth": transport_growth_ratio(current.a, previous.u, a0),
        "div_u": divergence_sup(current.u),
        "sphere_drift": float(np.max(np.abs(magnitude - 1.0))),
    }


def check_smallness(a0: SpectralField, u0: SpectralField, d0: SpectralField, scheme: SchemeSection) -> float:
    """
    Size η of the data against the threshold of the scheme.

    :return: η; above the threshold it raises in ``enforce`` mode and warns otherwise.
    """
    if float(a0.values.min()) <= DENSITY_GUARD:
        raise DensityRangeError(f"min a0 = {a0.values.min():.3e} is at or below {DENSITY_GUARD}")
    eta = smallness_eta(a0, u0, d0, scheme.p, scheme.r)
    if not smallness_holds(eta, scheme.c0):
        message = f"Data size η = {eta:.4e} exceeds the threshold c0 = {scheme.c0:.4e}"
        if scheme.smallness == "enforce":
            raise SmallnessViolationError(message)
        logging.warning(f"[SOLVER] {message}; continuing as requested")
    return eta


def picard_solve(
    a0: SpectralField,
    u0: SpectralField,
    d0: SpectralField,
    scheme: SchemeSection,
    constants: PhysicalConstants,
) -> tuple[Trajectory, list[IterationReport]]:
    """
    Run the outer iteration from iterate zero until the increment norm drops below ``scheme.tol``.

    :param a0: Initial density perturbation.
    :param u0: Divergence-free, mean-zero initial velocity.
    :param d0: Unit initial director.
    :param scheme: Scheme parameters.
    :param constants: Physical constants.
    :return: The last iterate and one report per iteration.
    """
    for field in (u0, d0):
        field.require_same_grid(a0.grid)
    a0.require_components(1)
    u0.require_components(a0.grid.dim)
    d0.require_components(a0.grid.dim)
    eta = check_smallness(a0, u0, d0, scheme)
    if scheme.regularization is not None:
        a0, u0, d0 = regularize_data(a0, u0, d0, scheme.regularization)
    table = None
    if not scheme.uses_unweighted_ledger:
        table = scheme.weighted_table(a0.grid.dim)
        table.check_existence_range(scheme.p)

    previous = initial_iterate(d0, scheme.times(), constants)
    reports: list[IterationReport] = []
    logging.info(
        f"[SOLVER] Iterating on {a0.grid.shape} with {scheme.steps} step(s) up to T = {scheme.horizon}, η = {eta:.3e}"
    )
    for n in range(1, scheme.n_max + 1):
        a_n = transport_trajectory(a0, previous.u)
        d_n = director_step(previous.d, previous.u, d0, constants)
        if scheme.normalize_director:
            d_n = normalize_director(d_n)
        u_n, grad_pi_n = velocity_step(previous.u, d_n, a_n, previous.grad_pi, u0, constants)
        current = Trajectory(a=a_n, u=u_n, d=d_n, grad_pi=grad_pi_n, constants=constants, iteration=n)

        components = delta_U(current.difference(previous), scheme.r, table)
        increment = math.fsum(components.values())
        converged = increment <= scheme.tol
        reports.append(
            IterationReport(
                n=n,
                delta_U=increment,
                components=components,
                converged=converged,
                monitors=iteration_monitors(current, previous, a0, eta),
            )
        )
        logging.info(f"[SOLVER] Iteration {n}: δU = {increment:.4e}")
        previous = current
        if converged:
            break
    else:
        last = reports[-1].delta_U
        logging.warning(f"[SOLVER] No convergence after {scheme.n_max} iteration(s), last δU = {last:.4e}")
    return previous, reports
