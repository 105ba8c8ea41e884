import typing

import numpy as np

from nematiclab.common.logging import setup_logging
from nematiclab.config.settings.run import SchemeSection
from nematiclab.domain.grid import Grid, PhysicalConstants
from nematiclab.duhamel.lemmas import family_modes
from nematiclab.duhamel.series import TimeSeriesField
from nematiclab.solver.state import Trajectory
from nematiclab.spectral.field import SpectralField
from nematiclab.spectral.kernels import RealArray
from nematiclab.spectral.operators import leray_project
from tests.analytic import planar_director, taylor_green_pressure_gradient, taylor_green_velocity


def setup_logging_for_tests(level: int) -> None:
    """
    Sets up logging for the tests at the requested level.
    """
    setup_logging(level=level)


def grid(points: int = 32, dim: int = 2, box_length: float = 2.0 * np.pi) -> Grid:
    return Grid(dim=dim, points_per_axis=points, box_length=box_length)


def trigonometric_field(sample_grid: Grid, components: int = 1, seed: int = 0, band: int = 3) -> SpectralField:
    """Random mean-zero trigonometric polynomial with modes up to ``band`` on every axis."""
    rng = np.random.default_rng(seed)
    modes = family_modes(sample_grid.dim, band)
    phases = sample_grid.fundamental_frequency * np.tensordot(modes, sample_grid.coordinates(), axes=(1, 0))
    cosine = rng.standard_normal((components, modes.shape[0]))
    sine = rng.standard_normal((components, modes.shape[0]))
    values = np.tensordot(cosine, np.cos(phases), axes=(1, 0)) + np.tensordot(sine, np.sin(phases), axes=(1, 0))
    return SpectralField(grid=sample_grid, values=values)


def solenoidal_field(sample_grid: Grid, seed: int = 0, band: int = 3, amplitude: float = 1.0) -> SpectralField:
    """Divergence-free mean-zero velocity scaled to the given sup norm."""
    projected = leray_project(trigonometric_field(sample_grid, sample_grid.dim, seed, band))
    return (amplitude / projected.max_abs()) * projected


def scheme(**overrides: typing.Any) -> SchemeSection:
    """Scheme section validated exactly like a run file, aliases included."""
    return SchemeSection.model_validate(overrides)


def max_gap(left: RealArray, right: RealArray) -> float:
    return float(np.max(np.abs(np.asarray(left) - np.asarray(right))))


def series(sample_grid: Grid, times: RealArray, values: typing.Callable[[float], RealArray]) -> TimeSeriesField:
    """Time series sampling ``values(t)`` at every level."""
    return TimeSeriesField(grid=sample_grid, times=times, values=np.stack([values(float(t)) for t in times]))


def taylor_green_trajectory(
    sample_grid: Grid, horizon: float = 0.5, steps: int = 32, amplitude: float = 1.0
) -> Trajectory:
    """Exact decaying vortex with its pressure gradient, unit director along e1 and uniform density."""
    times = np.linspace(0.0, horizon, steps + 1)
    constants = PhysicalConstants()
    director = np.zeros((sample_grid.dim, *sample_grid.shape))
    director[0] = 1.0
    return Trajectory(
        a=TimeSeriesField.zeros(sample_grid, times),
        u=series(sample_grid, times, lambda t: taylor_green_velocity(sample_grid, t, constants.nu, amplitude)),
        d=series(sample_grid, times, lambda _: director),
        grad_pi=series(
            sample_grid, times, lambda t: taylor_green_pressure_gradient(sample_grid, t, constants.nu, amplitude)
        ),
        constants=constants,
    )


def stationary_director_trajectory(sample_grid: Grid, horizon: float = 1.0, steps: int = 64) -> Trajectory:
    """Planar harmonic director at rest."""
    times = np.linspace(0.0, horizon, steps + 1)
    zeros = TimeSeriesField.zeros(sample_grid, times, sample_grid.dim)
    return Trajectory(
        a=TimeSeriesField.zeros(sample_grid, times),
        u=zeros,
        d=TimeSeriesField.constant(times, planar_director(sample_grid, 1)),
        grad_pi=zeros,
        constants=PhysicalConstants(),
    )
