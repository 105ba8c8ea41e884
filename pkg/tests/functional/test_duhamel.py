import math

import numpy as np
import pytest

from nematiclab.common.exceptions import (
    ComponentCountError,
    EmptyTimeSeriesError,
    GridMismatchError,
    HypothesisViolationError,
    TimeGridMismatchError,
    WeightSingularityError,
)
from nematiclab.domain.grid import Grid
from nematiclab.duhamel.lemmas import (
    LEMMA_BUILDERS,
    LemmaSettings,
    lemma_case,
    random_time_family,
    verify_lemma,
    weighted_bound_report,
)
from nematiclab.duhamel.operators import (
    SERIES_SWITCH,
    DuhamelOperator,
    apply_operator,
    exponential_convolution,
    interval_weights,
    op_A,
    op_B,
    op_C,
)
from nematiclab.duhamel.series import (
    TimeSeriesField,
    concatenate_components,
    lebesgue_norm,
    time_lebesgue,
    weighted_norm,
)
from nematiclab.spectral.field import SpectralField
from tests.analytic import cosine_lp_norm, cosine_mode
from tests.common import grid, max_gap


def _in_time(field: SpectralField, times: np.ndarray, profile: np.ndarray) -> TimeSeriesField:
    values = profile[:, np.newaxis, np.newaxis, np.newaxis] * field.values[np.newaxis]
    return TimeSeriesField(grid=field.grid, times=times, values=values)


def test_interval_weights_of_a_frozen_mode() -> None:
    decay, phi1, phi2_over_step = interval_weights(np.array([0.0]), 0.1)
    assert decay[0] == 1.0
    assert phi1[0] == pytest.approx(0.1, rel=1e-15)
    assert phi2_over_step[0] == pytest.approx(0.05, rel=1e-15)


def test_interval_weights_agree_across_the_series_switch() -> None:
    step = 0.01
    rates = np.array([0.999, 1.001, 50.0]) * SERIES_SWITCH / step
    decay, phi1, phi2_over_step = interval_weights(rates, step)
    x = rates * step
    exact_phi1 = -np.expm1(-x) / rates
    exact_phi2 = (-np.expm1(-x) - x * np.exp(-x)) / rates**2
    assert np.allclose(decay, np.exp(-x), rtol=1e-14)
    assert np.allclose(phi1, exact_phi1, rtol=1e-10)
    assert np.allclose(phi2_over_step * step, exact_phi2, rtol=1e-6)


def test_convolution_of_a_steady_source_is_exact(grid32: Grid) -> None:
    times = np.linspace(0.0, 1.0, 11)
    mode = cosine_mode(grid32, (1, 1))
    source = _in_time(mode, times, np.ones_like(times))
    result = op_C(source)
    expected = (-np.expm1(-2.0 * times) / 2.0)[:, np.newaxis, np.newaxis, np.newaxis] * mode.values
    assert max_gap(result.values, expected) < 1e-12


def test_convolution_of_a_linear_source_is_exact(grid32: Grid) -> None:
    times = np.linspace(0.0, 0.8, 9)
    mode = cosine_mode(grid32, (2, 0))
    rate = 4.0
    result = op_C(_in_time(mode, times, times))
    profile = (rate * times - 1.0 + np.exp(-rate * times)) / rate**2
    assert max_gap(result.values, profile[:, np.newaxis, np.newaxis, np.newaxis] * mode.values) < 1e-12


def test_exponential_convolution_carries_the_initial_value(grid32: Grid) -> None:
    times = np.linspace(0.0, 1.0, 5)
    mode = cosine_mode(grid32, (1, 0))
    result = exponential_convolution(TimeSeriesField.zeros(grid32, times), diffusivity=0.5, initial=mode)
    expected = np.exp(-0.5 * times)[:, np.newaxis, np.newaxis, np.newaxis] * mode.values
    assert max_gap(result.values, expected) < 1e-12


def test_operators_on_a_steady_mode(grid32: Grid) -> None:
    times = np.linspace(0.0, 1.0, 6)
    mode = cosine_mode(grid32, (1, 0))
    source = _in_time(mode, times, np.ones_like(times))
    factor = -np.expm1(-times)[:, np.newaxis, np.newaxis, np.newaxis]
    assert max_gap(op_A(source).values, -factor * mode.values) < 1e-12
    gradient = op_B(source)
    assert gradient.components == 2
    x1 = grid32.coordinates()[0]
    assert max_gap(gradient.values[:, 0], -factor[:, 0] * np.sin(x1)) < 1e-12
    assert max_gap(gradient.values[:, 1], 0.0) < 1e-12
    assert max_gap(apply_operator(DuhamelOperator.A, source).values, op_A(source).values) == 0.0


def test_time_series_validation(grid16: Grid) -> None:
    with pytest.raises(EmptyTimeSeriesError):
        TimeSeriesField(grid=grid16, times=np.zeros(0), values=np.zeros((0, 1, 16, 16)))
    with pytest.raises(TimeGridMismatchError):
        TimeSeriesField.zeros(grid16, [0.0, 0.5, 0.5])
    with pytest.raises(TimeGridMismatchError):
        TimeSeriesField.zeros(grid16, [-0.1, 0.5])
    with pytest.raises(ComponentCountError):
        TimeSeriesField(grid=grid16, times=np.array([0.0, 1.0]), values=np.zeros((3, 1, 16, 16)))
    with pytest.raises(EmptyTimeSeriesError):
        TimeSeriesField.from_fields([], [])


def test_time_series_alignment(grid16: Grid, grid32: Grid) -> None:
    first = TimeSeriesField.zeros(grid16, [0.0, 1.0])
    with pytest.raises(TimeGridMismatchError):
        first.require_aligned(TimeSeriesField.zeros(grid16, [0.0, 2.0]))
    with pytest.raises(GridMismatchError):
        first.require_aligned(TimeSeriesField.zeros(grid32, [0.0, 1.0]))
    joined = concatenate_components([first, TimeSeriesField.zeros(grid16, [0.0, 1.0], 2)])
    assert joined.components == 3
    assert joined.uniform


def test_time_series_levels_and_fields(grid16: Grid) -> None:
    mode = cosine_mode(grid16, (1, 0))
    series = TimeSeriesField.constant([0.0, 0.25, 1.0], mode)
    assert series.levels == 3
    assert series.horizon == 1.0
    assert not series.uniform
    assert max_gap(series.at(2).values, mode.values) == 0.0
    assert len(series.fields) == 3
    assert max_gap((2.0 * series - series).values, series.values) == 0.0


def test_lebesgue_norms_of_a_steady_field(grid32: Grid) -> None:
    mode = cosine_mode(grid32, (1, 0))
    series = TimeSeriesField.constant(np.linspace(0.0, 2.0, 21), mode)
    spatial = cosine_lp_norm(grid32, 2.0)
    assert lebesgue_norm(series, 2.0, 2.0) == pytest.approx(spatial * math.sqrt(2.0), rel=1e-12)
    assert lebesgue_norm(series, 2.0, math.inf) == pytest.approx(spatial, rel=1e-12)
    assert weighted_norm(series, 0.5, 2.0, 2.0) == pytest.approx(spatial * math.sqrt(2.0), rel=1e-12)
    assert time_lebesgue(np.ones(1), np.zeros(1), 2.0) == 0.0


def test_singular_weights_integrate_the_first_interval_in_closed_form(grid32: Grid) -> None:
    mode = cosine_mode(grid32, (1, 0))
    series = TimeSeriesField.constant(np.linspace(0.0, 1.0, 401), mode)
    spatial = cosine_lp_norm(grid32, 2.0)
    assert weighted_norm(series, -0.25, 2.0, 2.0) == pytest.approx(spatial * math.sqrt(2.0), rel=5e-3)


def test_non_integrable_weights_are_refused(grid16: Grid) -> None:
    series = TimeSeriesField.constant(np.linspace(0.0, 1.0, 5), cosine_mode(grid16, (1, 0)))
    with pytest.raises(WeightSingularityError):
        weighted_norm(series, -0.5, 2.0, 2.0)
    with pytest.raises(WeightSingularityError):
        weighted_norm(series, -0.1, 2.0, math.inf)


def test_every_lemma_is_registered() -> None:
    assert set(LEMMA_BUILDERS) == {"2.2", "2.3", "2.4", "2.5", "2.6", "2.7", "A.1", "A.2", "A.3", "A.4"}
    settings = LemmaSettings.for_dim(2)
    for name in LEMMA_BUILDERS:
        case = lemma_case(name, settings)
        assert case.name == name
        assert case.pairs


def test_violated_hypotheses_are_reported() -> None:
    with pytest.raises(HypothesisViolationError, match="2.6"):
        lemma_case("2.6", LemmaSettings(dim=2, p1=2.5, p3=8.0))
    with pytest.raises(HypothesisViolationError, match="r > 2"):
        lemma_case("A.4", LemmaSettings(dim=2, p1=1.6, p3=8.0, weighted_r=1.0))
    with pytest.raises(HypothesisViolationError, match="Unknown lemma"):
        lemma_case("9.9", LemmaSettings.for_dim(2))


def test_random_family_is_resolution_independent() -> None:
    coarse, fine = grid(16), grid(32)
    times = np.linspace(0.0, 1.0, 9)
    first = random_time_family(coarse, times, 2, seed=3)
    second = random_time_family(fine, np.linspace(0.0, 1.0, 17), 2, seed=3)
    for member, refined in zip(first, second, strict=True):
        assert max_gap(member.values, refined.values[::2, :, ::2, ::2]) < 1e-10
        assert np.allclose(member.values.mean(axis=(2, 3)), 0.0, atol=1e-12)


def test_bound_report_has_a_row_per_pair_and_member(grid16: Grid) -> None:
    case = lemma_case("A.4", LemmaSettings.for_dim(2))
    family = random_time_family(grid16, np.linspace(0.0, 1.0, 17), 3)
    report = weighted_bound_report(case, family)
    assert len(report.rows) == 3 * len(case.pairs)
    assert set(report.maxima()) == {pair.label for pair in case.pairs}
    assert all(math.isfinite(value) and value > 0.0 for value in report.maxima().values())


def test_heat_convolution_constants_are_stable_under_refinement(grid16: Grid) -> None:
    verdict = verify_lemma("2.4", grid16, levels=32, trials=3, seed=1)
    assert verdict.passed
    assert len(verdict.rows) == 3
    assert set(verdict.drift) == set(verdict.base_maxima)
    assert all(value < verdict.tolerance for value in verdict.drift.values())
