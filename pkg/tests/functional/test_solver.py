import math
from pathlib import Path

import numpy as np
import pytest

from nematiclab.cli.scenarios import scenario
from nematiclab.common.exceptions import (
    CFLViolationError,
    ComponentCountError,
    DensityRangeError,
    ExponentRangeError,
    InnerContractionError,
    InnerSweepDivergenceError,
    SmallnessViolationError,
    SnapshotFormatError,
    TimeGridMismatchError,
)
from nematiclab.config.settings.defaults import TRAJECTORY_METADATA_FILENAME
from nematiclab.domain.grid import Grid, PhysicalConstants
from nematiclab.domain.indices import WeightedExponentTable
from nematiclab.domain.reports import LedgerKind
from nematiclab.duhamel.series import TimeSeriesField
from nematiclab.services.sweeps import FixedPointSweeper
from nematiclab.solver.ledger import (
    DIRECTOR_SUP_LABEL,
    SUP_SQUARE_LABEL,
    delta_U,
    sup_square_norm,
    x_norm_ledger,
    y_norm_ledger,
)
from nematiclab.solver.picard import (
    check_smallness,
    frequency_truncation,
    initial_iterate,
    mollify,
    normalize_director,
    picard_solve,
    regularize_data,
    uniform_director,
)
from nematiclab.solver.state import Trajectory, load_trajectory, save_trajectory
from nematiclab.solver.steps import director_step, velocity_step
from nematiclab.solver.transport import require_cfl, transport_step, transport_trajectory
from nematiclab.solver.weak_form import default_test_functions, weak_form_residual
from nematiclab.spectral.field import SpectralField
from tests.analytic import cosine_mode, taylor_green_velocity
from tests.common import (
    max_gap,
    scheme,
    series,
    stationary_director_trajectory,
    taylor_green_trajectory,
    trigonometric_field,
)


def _unit_director(sample_grid: Grid) -> SpectralField:
    return SpectralField.constant(sample_grid, [1.0] + [0.0] * (sample_grid.dim - 1))


def _taylor_green_data(sample_grid: Grid) -> tuple[SpectralField, SpectralField, SpectralField]:
    velocity = SpectralField(grid=sample_grid, values=taylor_green_velocity(sample_grid, 0.0))
    return SpectralField.zeros(sample_grid), velocity, _unit_director(sample_grid)


def test_transport_by_a_uniform_velocity_shifts_the_density(grid32: Grid) -> None:
    times = np.linspace(0.0, 1.0, 9)
    a0 = 0.1 * cosine_mode(grid32, (1, 0))
    u = TimeSeriesField.constant(times, SpectralField.constant(grid32, [0.5, 0.0]))
    a = transport_trajectory(a0, u)
    x1 = grid32.coordinates()[0]
    for k, t in enumerate(times):
        assert max_gap(a.values[k, 0], 0.1 * np.cos(x1 - 0.5 * t)) < 1e-3
    assert a.values.max() <= a0.values.max()
    assert a.values.min() >= a0.values.min()


def test_transport_step_of_a_resting_fluid_keeps_the_density(grid16: Grid) -> None:
    a0 = trigonometric_field(grid16, seed=2)
    rest = SpectralField.zeros(grid16, 2)
    assert max_gap(transport_step(a0, rest, rest, 0.1).values, a0.values) < 1e-12
    times = np.linspace(0.0, 1.0, 5)
    static = transport_trajectory(a0, TimeSeriesField.zeros(grid16, times, 2))
    assert max_gap(static.values, a0.values[np.newaxis]) == 0.0


def test_characteristics_may_not_cross_a_quarter_of_the_box(grid16: Grid) -> None:
    assert require_cfl(np.full((2, 16, 16), 2.0 * grid16.spacing), grid16, 0.1) == pytest.approx(2.0)
    with pytest.raises(CFLViolationError):
        require_cfl(np.full((2, 16, 16), 5.0 * grid16.spacing), grid16, 0.1)
    fast = SpectralField.constant(grid16, [40.0, 0.0])
    with pytest.raises(CFLViolationError):
        transport_step(SpectralField.zeros(grid16), fast, fast, 0.1)


def test_sweeper_reports_a_map_that_does_not_contract(lab_environment) -> None:  # noqa: ANN001
    with lab_environment({"EL_INNER_MAX_SWEEPS": "3"}):
        sweeper = FixedPointSweeper()
        assert sweeper.max_sweeps == 3
        with pytest.raises(InnerContractionError, match="SHIFT"):
            sweeper.solve(lambda values: values + 1.0, np.zeros(4), "SHIFT")


def test_sweeper_detects_growing_residuals(lab_environment) -> None:  # noqa: ANN001
    with lab_environment({"EL_DIVERGENCE_WINDOW": "1"}):
        sweeper = FixedPointSweeper()
        with pytest.raises(InnerSweepDivergenceError):
            sweeper.solve(lambda values: np.where(values == 0.0, 1.0, -values), np.zeros(4), "FLIP")


def test_sweeper_settles_a_contraction() -> None:
    outcome = FixedPointSweeper().solve(lambda values: 0.01 * values + 1.0, np.zeros(3), "DAMPED")
    assert np.allclose(outcome.iterate, 1.0 / 0.99, atol=1e-9)
    assert outcome.residual <= 1e-10


def test_director_step_keeps_a_uniform_director_at_rest(grid16: Grid) -> None:
    times = np.linspace(0.0, 0.5, 9)
    d0 = _unit_director(grid16)
    rest = TimeSeriesField.zeros(grid16, times, 2)
    d = director_step(TimeSeriesField.constant(times, d0), rest, d0, PhysicalConstants())
    assert max_gap(d.values, d0.values[np.newaxis]) < 1e-12


def test_velocity_step_reproduces_the_decaying_vortex(grid16: Grid) -> None:
    exact = taylor_green_trajectory(grid16, horizon=0.25, steps=16)
    u, grad_pi = velocity_step(exact.u, exact.d, exact.a, exact.grad_pi, exact.u.at(0), exact.constants)
    assert max_gap(u.values, exact.u.values) < 1e-10
    assert max_gap(grad_pi.values, exact.grad_pi.values) < 1e-10


def test_iteration_from_zero_data_stops_at_once(grid16: Grid) -> None:
    zero = SpectralField.zeros(grid16, 2)
    trajectory, reports = picard_solve(
        SpectralField.zeros(grid16), zero, _unit_director(grid16), scheme(T=0.1, dt=0.025), PhysicalConstants()
    )
    assert len(reports) == 1
    assert reports[0].converged
    assert reports[0].delta_U < 1e-12
    assert trajectory.iteration == 1
    assert np.max(np.abs(trajectory.u.values)) < 1e-12


def test_iteration_converges_to_the_decaying_vortex(grid16: Grid) -> None:
    a0, u0, d0 = _taylor_green_data(grid16)
    trajectory, reports = picard_solve(a0, u0, d0, scheme(T=0.25, dt=1 / 64, smallness="warn"), PhysicalConstants())
    assert reports[-1].converged
    assert len(reports) <= 4
    exact = taylor_green_trajectory(grid16, horizon=0.25, steps=16)
    assert max_gap(trajectory.u.values, exact.u.values) < 1e-9
    assert max_gap(trajectory.d.values, exact.d.values) < 1e-12
    assert reports[-1].monitors["sphere_drift"] < 1e-12


def test_iteration_starts_from_rest_with_a_uniform_director(grid16: Grid) -> None:
    data = scenario("random_small", {"eta": 0.01}, seed=2).initial_data(grid16, scheme())
    times = scheme(T=0.25, dt=1 / 16).times()
    start = initial_iterate(data.d0, times, PhysicalConstants())
    for field in (start.a, start.u, start.grad_pi):
        assert not np.any(field.values)
    assert start.d.levels == times.size
    assert np.allclose(start.d.spatial_norms(math.inf), 1.0, atol=1e-14)
    direction = data.d0.mean() / np.linalg.norm(data.d0.mean())
    assert np.allclose(start.d.values[:, :, 0, 0], direction, atol=1e-14)


def test_uniform_director_of_a_winding_field_is_the_first_axis(grid16: Grid) -> None:
    winding = scenario("stationary_director", {"m": 1}).initial_data(grid16, scheme()).d0
    assert np.array_equal(uniform_director(winding).values, _unit_director(grid16).values)
    tilted = SpectralField.constant(grid16, [3.0, 4.0])
    assert np.allclose(uniform_director(tilted).values[:, 0, 0], [0.6, 0.8])


@pytest.mark.slow
def test_small_random_data_contract_at_every_iteration(grid16: Grid) -> None:
    data = scenario("random_small", {"eta": 0.01}, seed=5).initial_data(grid16, scheme())
    _, reports = picard_solve(data.a0, data.u0, data.d0, scheme(T=0.25, dt=1 / 32, tol=1e-13), PhysicalConstants())
    increments = [report.delta_U for report in reports]
    assert reports[-1].converged
    resolved = [(n, value) for n, value in enumerate(increments, start=1) if value > 1e-11]
    for (n, value), (_, following) in zip(resolved, resolved[1:], strict=False):
        if n >= 2:  # noqa: PLR2004
            assert following <= 0.5 * value, increments
    assert all(later <= earlier for earlier, later in zip(increments[1:], increments[2:], strict=False)), increments


@pytest.mark.slow
def test_stirred_mixture_keeps_its_densities(grid16: Grid) -> None:
    data = scenario("mixture_step_density").initial_data(grid16, scheme())
    trajectory, reports = picard_solve(
        data.a0, data.u0, data.d0, scheme(T=0.25, dt=1 / 32, n_max=6, smallness="warn"), PhysicalConstants()
    )
    bound = float(np.max(np.abs(data.a0.values)))
    assert all(report.monitors["a_max"] <= bound for report in reports)
    assert np.max(np.abs(trajectory.a.values)) <= bound
    assert float(np.max(trajectory.a.values)) > 0.9 * bound


def test_large_data_are_refused_unless_only_reported(grid16: Grid) -> None:
    a0, u0, d0 = _taylor_green_data(grid16)
    with pytest.raises(SmallnessViolationError):
        check_smallness(a0, u0, d0, scheme())
    assert check_smallness(a0, u0, d0, scheme(smallness="warn")) > 0.05


def test_density_must_stay_away_from_vacuum(grid16: Grid) -> None:
    with pytest.raises(DensityRangeError):
        check_smallness(
            SpectralField.constant(grid16, [-0.95]),
            SpectralField.zeros(grid16, 2),
            _unit_director(grid16),
            scheme(),
        )


def test_regularization_of_the_data(grid32: Grid) -> None:
    a0 = 0.1 * trigonometric_field(grid32, seed=1) + 0.05
    mollified = mollify(a0, 2)
    assert mollified.values.max() <= a0.values.max()
    assert mollified.values.min() >= a0.values.min()
    assert mollify(a0, 0).mean() == pytest.approx(a0.mean())
    field = trigonometric_field(grid32, components=2, seed=4) + 0.3
    assert max_gap(frequency_truncation(field, 10).values, field.values) < 1e-11
    with pytest.raises(ValueError):
        regularize_data(a0, field, field, -1)


def test_director_normalization(grid16: Grid) -> None:
    times = np.linspace(0.0, 1.0, 3)
    stretched = TimeSeriesField.constant(times, SpectralField.constant(grid16, [3.0, 4.0]))
    assert max_gap(normalize_director(stretched).values[:, 0], 0.6) < 1e-15


def test_trajectory_validation(grid16: Grid) -> None:
    times = np.linspace(0.0, 1.0, 3)
    vector = TimeSeriesField.zeros(grid16, times, 2)
    with pytest.raises(ComponentCountError):
        Trajectory(a=vector, u=vector, d=vector, grad_pi=vector, constants=PhysicalConstants())
    uneven = [0.0, 0.1, 1.0]
    scalar = TimeSeriesField.zeros(grid16, uneven)
    other = TimeSeriesField.zeros(grid16, uneven, 2)
    with pytest.raises(TimeGridMismatchError):
        Trajectory(a=scalar, u=other, d=other, grad_pi=other, constants=PhysicalConstants())


def test_trajectory_survives_a_round_trip_on_disk(tmp_path: Path, grid16: Grid) -> None:
    trajectory = taylor_green_trajectory(grid16, horizon=0.25, steps=8)
    index = save_trajectory(trajectory, tmp_path / "run", stride=2)
    assert index.name == TRAJECTORY_METADATA_FILENAME
    restored = load_trajectory(tmp_path / "run")
    assert restored.levels == 5
    assert np.allclose(restored.times, trajectory.times[::2])
    assert np.array_equal(restored.u.values, trajectory.u.values[::2])
    assert restored.constants == trajectory.constants
    with pytest.raises(SnapshotFormatError):
        load_trajectory(tmp_path / "missing")


def test_ledgers_of_a_resting_state_vanish(grid16: Grid) -> None:
    trajectory = stationary_director_trajectory(grid16, steps=8)
    increment = trajectory.difference(trajectory)
    components = delta_U(increment, 1.5)
    assert set(components) >= {DIRECTOR_SUP_LABEL, SUP_SQUARE_LABEL}
    assert math.fsum(components.values()) == 0.0


def test_unweighted_ledger_of_the_vortex(grid16: Grid) -> None:
    trajectory = taylor_green_trajectory(grid16, horizon=0.25, steps=8)
    ledger = x_norm_ledger(trajectory, 1.5)
    assert ledger.kind == LedgerKind.UNWEIGHTED
    assert ledger.total == pytest.approx(math.fsum(ledger.components.values()))
    assert ledger.total > 0.0
    assert sup_square_norm(trajectory) > 0.0


def test_weighted_ledger_of_the_vortex(grid16: Grid) -> None:
    trajectory = taylor_green_trajectory(grid16, horizon=0.25, steps=8)
    ledger = y_norm_ledger(trajectory, WeightedExponentTable.from_indices(2, 2.5, 1.6, 8.0))
    assert ledger.kind == LedgerKind.WEIGHTED
    assert all(math.isfinite(value) and value >= 0.0 for value in ledger.components.values())
    assert ledger.total > 0.0
    with pytest.raises(ExponentRangeError):
        y_norm_ledger(trajectory, WeightedExponentTable.from_indices(2, 2.5, 1.6, 8.0), p=1.8)


def test_exact_solutions_satisfy_the_weak_form(grid16: Grid) -> None:
    for trajectory in (taylor_green_trajectory(grid16), stationary_director_trajectory(grid16)):
        residuals = weak_form_residual(trajectory, default_test_functions(trajectory))
        assert max(residuals) < 1e-4


def test_a_wrong_director_violates_the_weak_form(grid16: Grid) -> None:
    exact = stationary_director_trajectory(grid16)
    d0 = exact.d.at(0).values
    growing = series(grid16, exact.times, lambda t: (1.0 + t) * d0)
    wrong = Trajectory(a=exact.a, u=exact.u, d=growing, grad_pi=exact.grad_pi, constants=exact.constants)
    assert max(weak_form_residual(wrong, default_test_functions(wrong))) > 1e-2
