"""
Energy law and constraint monitors along a trajectory.
"""

import logging
import typing

import numpy as np

from nematiclab.domain.reports import DiagnosticsRow
from nematiclab.lagrangian.calculus import time_derivative
from nematiclab.solver.nonlinear import gradient_energy
from nematiclab.solver.picard import divergence_profile
from nematiclab.solver.state import Trajectory
from nematiclab.spectral import kernels
from nematiclab.spectral.field import inverse_transform, pointwise_magnitude
from nematiclab.spectral.kernels import RealArray

ENERGY_MONOTONICITY_TOLERANCE = 1e-8


def _integral(density: RealArray, trajectory: Trajectory) -> RealArray:
    """∫ over the torus of a pointwise density shaped (K + 1, M, ..., M)."""
    grid = trajectory.grid
    return np.sum(density, axis=tuple(range(1, grid.dim + 1))) * grid.cell_volume  # type: ignore[no-any-return]


def _component_sum(values: RealArray, dim: int) -> RealArray:
    return np.sum(values, axis=-(dim + 1))  # type: ignore[no-any-return]


def energy_profile(trajectory: Trajectory) -> tuple[RealArray, RealArray]:
    """
    Energy ½∫(ρ|u|² + λ|∇d|²) with ρ = 1/(1 + a) and dissipation ∫(ν|∇u|² + λγ|Δd + |∇d|²d|²) at every level.

    :return: Both profiles, each of length K + 1.
    """
    grid, dim, constants = trajectory.grid, trajectory.grid.dim, trajectory.constants
    u, d = trajectory.u, trajectory.d
    density = 1.0 / (1.0 + trajectory.a.values[:, 0])
    gradient_u = inverse_transform(kernels.gradient_hat(u.fourier, grid), dim)
    gradient_d = inverse_transform(kernels.gradient_hat(d.fourier, grid), dim)
    laplacian_d = inverse_transform(kernels.laplacian_hat(d.fourier, grid), dim)
    tension = laplacian_d + gradient_energy(gradient_d, dim) * d.values

    kinetic = density * _component_sum(u.values**2, dim)
    elastic = constants.lambda_ * _component_sum(gradient_d**2, dim)
    energy = 0.5 * _integral(kinetic + elastic, trajectory)
    dissipation = _integral(
        constants.nu * _component_sum(gradient_u**2, dim)
        + constants.lambda_ * constants.gamma * _component_sum(tension**2, dim),
        trajectory,
    )
    return energy, dissipation


def energy_report(trajectory: Trajectory) -> list[DiagnosticsRow]:
    """
    One row per time level with the energy, its rate from centered differences and the residual of the law
    dE/dt = −dissipation, next to the divergence, sphere and density monitors.

    :param trajectory: Converged trajectory.
    :return: The rows in time order.
    """
    dim = trajectory.grid.dim
    energy, dissipation = energy_profile(trajectory)
    rate = time_derivative(energy, trajectory.times) if trajectory.levels > 1 else np.zeros_like(energy)
    divergence = divergence_profile(trajectory.u)
    magnitude = pointwise_magnitude(trajectory.d.values, dim)
    sphere = np.max(np.abs(magnitude - 1.0).reshape(trajectory.levels, -1), axis=1)
    density = np.max(np.abs(trajectory.a.values).reshape(trajectory.levels, -1), axis=1)
    rows = [
        DiagnosticsRow(
            time=float(trajectory.times[k]),
            energy=float(energy[k]),
            dissipation=float(dissipation[k]),
            div_norm=float(divergence[k]),
            sphere_drift=float(sphere[k]),
            a_max=float(density[k]),
            energy_rate=float(rate[k]),
            law_residual=float(abs(rate[k] + dissipation[k])),
        )
        for k in range(trajectory.levels)
    ]
    logging.debug(f"[DIAGNOSTICS] Energy from {energy[0]:.6e} to {energy[-1]:.6e} over {trajectory.levels} level(s)")
    return rows


def energy_is_nonincreasing(
    rows: typing.Sequence[DiagnosticsRow], tolerance: float = ENERGY_MONOTONICITY_TOLERANCE
) -> bool:
    """Whether no step raises the energy by more than ``tolerance`` relative to max(1, E(0))."""
    if len(rows) < 2:  # noqa: PLR2004
        return True
    energy = np.array([row.energy for row in rows])
    return bool(np.max(np.diff(energy)) <= tolerance * max(1.0, float(energy[0])))


def largest_energy_increase(rows: typing.Sequence[DiagnosticsRow]) -> float:
    energy = np.array([row.energy for row in rows])
    return float(max(0.0, np.max(np.diff(energy)))) if energy.size > 1 else 0.0
