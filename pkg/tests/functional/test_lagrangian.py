import numpy as np
import pytest

from nematiclab.common.exceptions import CompatibilityError, ComponentCountError, NeumannRadiusError
from nematiclab.config.settings.defaults import (
    DELTA_A_THRESHOLD,
    GRADIENT_IDENTITY_THRESHOLD,
    LAGRANGIAN_RESIDUAL_THRESHOLD,
    VOLUME_THRESHOLD,
)
from nematiclab.domain.grid import Grid, PhysicalConstants
from nematiclab.domain.reports import InverseSource
from nematiclab.duhamel.series import TimeSeriesField
from nematiclab.lagrangian import calculus
from nematiclab.lagrangian.flow import flow_map, inverse_jacobian, neumann_A
from nematiclab.lagrangian.transform import (
    LAGRANGIAN_EQUATIONS,
    LagrangianState,
    lagrangian_identities,
    lagrangian_residuals,
    to_lagrangian,
)
from nematiclab.lagrangian.uniqueness import (
    SOURCE_NAMES,
    delta_A_identity,
    delta_sources,
    density_factor,
    solution_sources,
    stokes_div_block_solve,
)
from nematiclab.solver.state import Trajectory
from nematiclab.spectral.field import SpectralField
from nematiclab.spectral.operators import gradient, spectral_divergence_norm
from tests.analytic import cosine_mode
from tests.common import max_gap, series, solenoidal_field, taylor_green_trajectory


def _moving_trajectory(velocity: TimeSeriesField) -> Trajectory:
    sample_grid, times = velocity.grid, velocity.times
    director = SpectralField.constant(sample_grid, [1.0, 0.0])
    return Trajectory(
        a=TimeSeriesField.zeros(sample_grid, times),
        u=velocity,
        d=TimeSeriesField.constant(times, director),
        grad_pi=TimeSeriesField.zeros(sample_grid, times, 2),
        constants=PhysicalConstants(),
    )


def _shear(sample_grid: Grid, strength: float, horizon: float, steps: int) -> TimeSeriesField:
    values = np.zeros((2, *sample_grid.shape))
    values[0] = strength * np.sin(sample_grid.coordinates()[1])
    times = np.linspace(0.0, horizon, steps + 1)
    return TimeSeriesField.constant(times, SpectralField(grid=sample_grid, values=values))


def test_uniform_flow_translates_every_particle(grid16: Grid) -> None:
    times = np.linspace(0.0, 1.0, 9)
    velocity = TimeSeriesField.constant(times, SpectralField.constant(grid16, [0.3, -0.2]))
    flow = flow_map(_moving_trajectory(velocity))
    expected = np.multiply.outer(times, np.array([0.3, -0.2]))[:, :, np.newaxis, np.newaxis]
    assert max_gap(flow.X, expected) < 1e-12
    assert max_gap(flow.Y, -expected) < 1e-12
    assert flow.inverse_defect() < 1e-12
    assert flow.volume_defect() < 1e-12
    assert flow.neumann_available
    assert all(certificate.source is InverseSource.SERIES for certificate in flow.certificates)


def test_shear_flow_has_a_nilpotent_jacobian_offset(grid16: Grid) -> None:
    flow = flow_map(_moving_trajectory(_shear(grid16, 0.5, 1.5, 24)))
    y2 = grid16.coordinates()[1]
    assert max_gap(flow.X[-1, 0], 0.75 * np.sin(y2)) < 1e-12
    assert max_gap(flow.X[:, 1], 0.0) < 1e-12
    assert max_gap(flow.A[-1, 0, 1], -0.75 * np.cos(y2)) < 1e-10
    assert flow.volume_defect() < 1e-10
    assert flow.inverse_consistency() < 1e-10
    assert flow.certificates[-1].terms == 1
    assert flow.certificates[-1].radius == pytest.approx(0.75)


def test_large_shear_falls_back_to_direct_inversion(grid16: Grid) -> None:
    trajectory = _moving_trajectory(_shear(grid16, 0.5, 3.0, 48))
    flow = flow_map(trajectory)
    assert flow.certificates[-1].source is InverseSource.DIRECT
    assert flow.certificates[0].source is InverseSource.SERIES
    assert flow.inverse_defect() < 1e-10
    assert not flow.neumann_available
    with pytest.raises(NeumannRadiusError):
        flow_map(trajectory, require_series=True)


def test_neumann_series_matches_direct_inversion() -> None:
    rng = np.random.default_rng(7)
    offset = rng.uniform(-0.15, 0.15, size=(2, 2, 2, 4, 4))
    series_inverse, certificates = inverse_jacobian(offset)
    eye = np.eye(2).reshape(1, 2, 2, 1, 1)
    assert max_gap(series_inverse, calculus.inverse(eye + offset)) < 1e-10
    for certificate in certificates:
        assert certificate.source is InverseSource.SERIES
        assert certificate.radius < 1.0
        assert certificate.tail_bound < 1e-8


def test_lagrangian_velocity_needs_a_vector(grid16: Grid) -> None:
    with pytest.raises(ComponentCountError):
        neumann_A(TimeSeriesField.zeros(grid16, [0.0, 1.0]))


def test_both_frames_agree_on_a_decaying_vortex(grid32: Grid) -> None:
    trajectory = taylor_green_trajectory(grid32, horizon=0.5, steps=32, amplitude=0.2)
    flow = flow_map(trajectory)
    state = to_lagrangian(trajectory, flow)
    identities = lagrangian_identities(trajectory, flow, state)
    assert identities["grad_u"] < GRADIENT_IDENTITY_THRESHOLD
    assert identities["grad_d"] < GRADIENT_IDENTITY_THRESHOLD
    assert identities["inverse_map"] < GRADIENT_IDENTITY_THRESHOLD
    assert identities["volume"] < VOLUME_THRESHOLD
    assert identities["inverse"] < 1e-8
    assert identities["transport"] == 0.0
    residuals = lagrangian_residuals(state)
    assert set(residuals) == set(LAGRANGIAN_EQUATIONS)
    assert max(residuals.values()) < LAGRANGIAN_RESIDUAL_THRESHOLD


def test_difference_of_inverse_jacobians_expands_as_a_double_sum(grid16: Grid) -> None:
    times = np.linspace(0.0, 1.0, 9)
    first = TimeSeriesField.constant(times, solenoidal_field(grid16, seed=1, amplitude=0.02))
    second = TimeSeriesField.constant(times, solenoidal_field(grid16, seed=2, amplitude=0.02))
    report = delta_A_identity(first, second)
    assert report.discrepancy < DELTA_A_THRESHOLD
    assert report.delta_A_max > 0.0
    assert report.terms >= 1
    fast = TimeSeriesField.constant(times, solenoidal_field(grid16, seed=3, amplitude=5.0))
    with pytest.raises(NeumannRadiusError):
        delta_A_identity(first, fast)


def _random_state(sample_grid: Grid, seed: int, b: np.ndarray | None = None) -> LagrangianState:
    rng = np.random.default_rng(seed)
    levels, shape = 4, sample_grid.shape

    def draw(*components: int) -> np.ndarray:
        return 0.1 * rng.standard_normal((levels, *components, *shape))

    h = draw(2, 2)
    return LagrangianState(
        grid=sample_grid,
        times=np.linspace(0.0, 0.3, levels),
        constants=PhysicalConstants(),
        b=draw(1) if b is None else b,
        v=draw(2),
        omega=draw(2),
        P=draw(1),
        h=h,
        h_pulled=h,
        A=calculus.identity(sample_grid, levels) + draw(2, 2),
    )


def test_difference_sources_telescope(grid16: Grid) -> None:
    first = _random_state(grid16, 11)
    second = _random_state(grid16, 12, b=first.b)
    density = density_factor(first)
    one, two = solution_sources(first, density), solution_sources(second, density)
    deltas = delta_sources(first, second)
    assert set(deltas) == set(SOURCE_NAMES)
    for name in SOURCE_NAMES:
        scale = max(1.0, float(np.max(np.abs(one[name]))))
        assert max_gap(deltas[name], one[name] - two[name]) < 1e-12 * scale, name


def test_stokes_block_separates_gradient_forcing(grid16: Grid) -> None:
    times = np.linspace(0.0, 1.0, 9)
    potential = cosine_mode(grid16, (1, 2))
    forcing = TimeSeriesField.constant(times, gradient(potential))
    no_divergence = TimeSeriesField.zeros(grid16, times)
    no_flux = TimeSeriesField.zeros(grid16, times, 2)
    velocity, pressure = stokes_div_block_solve(forcing, no_divergence, no_flux)
    assert np.max(np.abs(velocity.values)) < 1e-12
    assert max_gap(pressure.values, potential.values[np.newaxis]) < 1e-12


def test_stokes_block_keeps_the_divergence_free_part(grid16: Grid) -> None:
    times = np.linspace(0.0, 1.0, 9)
    forcing = TimeSeriesField.constant(times, solenoidal_field(grid16, seed=5))
    velocity, pressure = stokes_div_block_solve(
        forcing, TimeSeriesField.zeros(grid16, times), TimeSeriesField.zeros(grid16, times, 2)
    )
    assert max(spectral_divergence_norm(field) for field in velocity.fields) < 1e-10
    assert np.max(np.abs(pressure.values)) < 1e-12
    assert np.max(np.abs(velocity.values[-1])) > 0.0


def test_stokes_block_requires_a_compatible_divergence(grid16: Grid) -> None:
    times = np.linspace(0.0, 1.0, 5)
    shifted = series(grid16, times, lambda t: (1.0 + t) * cosine_mode(grid16, (1, 0)).values)
    with pytest.raises(CompatibilityError):
        stokes_div_block_solve(
            TimeSeriesField.zeros(grid16, times, 2), shifted, TimeSeriesField.zeros(grid16, times, 2)
        )
