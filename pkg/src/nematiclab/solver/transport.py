"""
Semi-Lagrangian transport of the density perturbation along backward characteristics.
"""

import logging

import numpy as np

from nematiclab.common.exceptions import CFLViolationError, ComponentCountError
from nematiclab.config.settings.defaults import CFL_GRID_FRACTION
from nematiclab.domain.grid import Grid
from nematiclab.duhamel.series import TimeSeriesField
from nematiclab.spectral.field import SpectralField
from nematiclab.spectral.interpolation import PeriodicInterpolator
from nematiclab.spectral.kernels import RealArray


def require_cfl(displacement: RealArray, grid: Grid, step: float) -> float:
    """
    Raise :class:`CFLViolationError` when a departure point lies more than M/4 cells away.

    :return: The largest displacement in cells.
    """
    cells = float(np.max(np.abs(displacement))) / grid.spacing
    limit = CFL_GRID_FRACTION * grid.points_per_axis
    if cells > limit:
        raise CFLViolationError(f"Characteristics move {cells:.1f} cells in one step Δt = {step:.3e}, limit {limit}")
    return cells


def departure_displacement(u_start: RealArray, u_end: RealArray, grid: Grid, step: float) -> RealArray:
    """
    Displacement α with x − α the departure point of the characteristic reaching x after one step.
    Two midpoint stages on the time-averaged velocity.

    :param u_start: Velocity values at the start of the step, shape (N, M, ..., M).
    :param u_end: Velocity values at the end of the step.
    :param grid: Spatial grid.
    :param step: Step length Δt.
    :return: α of shape (N, M, ..., M).
    """
    midpoint = 0.5 * (np.asarray(u_start) + np.asarray(u_end))
    first = step * midpoint
    interpolator = PeriodicInterpolator.from_values(midpoint, grid)
    displacement = step * interpolator(grid.coordinates() - 0.5 * first)
    require_cfl(displacement, grid, step)
    return displacement


def backward_displacements(u: TimeSeriesField) -> RealArray:
    """
    Displacements Φ_k with x − Φ_k(x) the position at t = 0 of the particle found at x at time t_k.
    One-step maps are composed, Φ_{k+1}(x) = α_k(x) + Φ_k(x − α_k(x)).

    :param u: Velocity on the time grid, N components.
    :return: Array of shape (K + 1, N, M, ..., M), Φ_0 = 0.
    """
    if u.components != u.grid.dim:
        raise ComponentCountError(f"Transport needs an {u.grid.dim}-component velocity, got {u.components}")
    grid = u.grid
    points = grid.coordinates()
    displacements = np.zeros_like(u.values)
    for k in range(u.levels - 1):
        step = float(u.times[k + 1] - u.times[k])
        alpha = departure_displacement(u.values[k], u.values[k + 1], grid, step)
        if k == 0:
            displacements[1] = alpha
            continue
        previous = PeriodicInterpolator.from_values(displacements[k], grid)
        displacements[k + 1] = alpha + previous(points - alpha)
    return displacements


def transport_step(a_prev: SpectralField, u_start: SpectralField, u_end: SpectralField, step: float) -> SpectralField:
    """
    Advance ∂_t a + u·∇a = 0 over one step, clamped to the range of ``a_prev``.

    :param a_prev: Density perturbation at the start of the step.
    :param u_start: Velocity at the start of the step.
    :param u_end: Velocity at the end of the step.
    :param step: Step length.
    :return: The transported perturbation.
    """
    grid = a_prev.grid
    alpha = departure_displacement(u_start.values, u_end.values, grid, step)
    values = PeriodicInterpolator.from_values(a_prev.values, grid)(grid.coordinates() - alpha)
    return SpectralField(grid=grid, values=np.clip(values, a_prev.values.min(), a_prev.values.max()))


def transport_trajectory(
    a0: SpectralField, u: TimeSeriesField, displacements: RealArray | None = None
) -> TimeSeriesField:
    """
    Density perturbation a(t_k, x) = a0(x − Φ_k(x)) on the time grid of ``u``.
    Values are clamped to [min a0, max a0] so the maximum principle holds exactly.

    :param a0: Initial perturbation.
    :param u: Transporting velocity.
    :param displacements: Precomputed :func:`backward_displacements` of ``u``.
    :return: The transported perturbation at every level.
    """
    a0.require_same_grid(u.grid)
    if displacements is None:
        displacements = backward_displacements(u)
    if not np.any(displacements):
        return TimeSeriesField.constant(u.times, a0)
    interpolator = PeriodicInterpolator.from_values(a0.values, a0.grid)
    points = a0.grid.coordinates()
    values = np.stack([interpolator(points - displacement) for displacement in displacements])
    values[0] = a0.values
    low, high = float(a0.values.min()), float(a0.values.max())
    logging.debug(f"[TRANSPORT] Transported density over {u.levels} levels within [{low:.3e}, {high:.3e}]")
    return TimeSeriesField(grid=u.grid, times=u.times, values=np.clip(values, low, high))
