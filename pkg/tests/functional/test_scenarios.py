import numpy as np
import pytest

from nematiclab.besov.norms import besov_norm, smallness_eta
from nematiclab.cli.scenarios import SCENARIO_REGISTRY, InitialData, Scenario, relative_gap, scenario
from nematiclab.common.exceptions import ConfigurationError, UnknownScenarioError
from nematiclab.config.settings.run import SchemeSection
from nematiclab.domain.grid import Grid, PhysicalConstants
from nematiclab.domain.indices import BesovIndex
from nematiclab.spectral.operators import spectral_divergence_norm
from tests.analytic import taylor_green_velocity
from tests.common import max_gap, scheme


def test_registry_holds_the_built_in_scenarios() -> None:
    assert set(SCENARIO_REGISTRY) == {
        "zero",
        "stationary_director",
        "taylor_green",
        "mixture_step_density",
        "random_small",
    }


def test_scenario_names_are_unique() -> None:
    with pytest.raises(ValueError, match="already taken"):

        class Shadow(Scenario):
            name = "zero"

            def fields(self, grid: Grid, scheme: SchemeSection) -> InitialData:
                raise NotImplementedError

    assert SCENARIO_REGISTRY["zero"].__name__ == "ZeroScenario"


def test_unknown_scenarios_and_parameters() -> None:
    with pytest.raises(UnknownScenarioError):
        scenario("vortex_street")
    with pytest.raises(ConfigurationError, match="data.parameters"):
        scenario("taylor_green", {"wavenumber": 2.0})


def test_winding_number_must_be_an_integer(grid16: Grid) -> None:
    with pytest.raises(ConfigurationError):
        scenario("stationary_director", {"m": 1.5}).initial_data(grid16, scheme())


def test_vortex_scenario_decays_like_the_exact_solution(grid16: Grid) -> None:
    model = scenario("taylor_green")
    data = model.initial_data(grid16, scheme())
    times = np.linspace(0.0, 0.5, 5)
    expected = model.expected(data, times, PhysicalConstants())
    assert expected is not None
    velocity, director = expected
    for k, time in enumerate(times):
        assert max_gap(velocity.values[k], taylor_green_velocity(grid16, float(time))) < 1e-12
    assert max_gap(director.values[:, 0], 1.0) == 0.0
    assert relative_gap(velocity.values, velocity.values) == 0.0


def test_analytic_scenarios_only_report_their_size() -> None:
    enforced = scheme()
    assert scenario("taylor_green").scheme_for(enforced).smallness == "warn"
    assert scenario("stationary_director").scheme_for(enforced).smallness == "warn"
    assert scenario("random_small").scheme_for(enforced).smallness == "enforce"


@pytest.mark.parametrize("name", ["zero", "stationary_director", "taylor_green", "mixture_step_density"])
def test_scenario_velocities_are_divergence_free(grid16: Grid, name: str) -> None:
    data = scenario(name).initial_data(grid16, scheme())
    assert spectral_divergence_norm(data.u0) < 1e-12
    assert np.allclose(np.sum(data.d0.values**2, axis=0), 1.0, atol=1e-14)


def test_mixture_velocity_has_the_requested_critical_size(grid32: Grid) -> None:
    settings = scheme()
    data = scenario("mixture_step_density", {"velocity_eta": 0.02}).initial_data(grid32, settings)
    size = besov_norm(data.u0, BesovIndex.critical(grid32.dim, settings.p, settings.r))
    assert size == pytest.approx(0.02, rel=1e-9)
    assert np.max(np.abs(data.a0.values)) <= 0.02


@pytest.mark.parametrize("target", [0.01, 0.03])
def test_random_data_hit_the_requested_size(grid16: Grid, target: float) -> None:
    settings = scheme()
    data = scenario("random_small", {"eta": target}, seed=5).initial_data(grid16, settings)
    eta = smallness_eta(data.a0, data.u0, data.d0, settings.p, settings.r)
    assert eta == pytest.approx(target, rel=1e-6)


def test_random_data_depend_only_on_the_seed(grid16: Grid) -> None:
    settings = scheme()
    first = scenario("random_small", seed=2).initial_data(grid16, settings)
    again = scenario("random_small", seed=2).initial_data(grid16, settings)
    other = scenario("random_small", seed=3).initial_data(grid16, settings)
    assert np.array_equal(first.u0.values, again.u0.values)
    assert not np.array_equal(first.u0.values, other.u0.values)


def test_random_data_need_a_positive_target(grid16: Grid) -> None:
    with pytest.raises(ConfigurationError, match="eta"):
        scenario("random_small", {"eta": 0.0}).initial_data(grid16, scheme())
