"""
Built-in initial data. Every concrete subclass of :class:`Scenario` registers itself under its ``name``.
"""

import abc
import dataclasses
import logging
import typing

import numpy as np
import scipy.optimize

from nematiclab.besov.norms import besov_norm, smallness_eta
from nematiclab.common.exceptions import ConfigurationError, UnknownScenarioError
from nematiclab.config.settings.run import SchemeSection
from nematiclab.domain.grid import Grid, PhysicalConstants
from nematiclab.domain.indices import BesovIndex
from nematiclab.duhamel.lemmas import family_modes
from nematiclab.duhamel.series import TimeSeriesField
from nematiclab.spectral.field import SpectralField, pointwise_magnitude
from nematiclab.spectral.kernels import RealArray
from nematiclab.spectral.operators import leray_project

SCENARIO_REGISTRY: dict[str, type["Scenario"]] = {}

BRACKET_DOUBLINGS = 60

ExactSolution = tuple[TimeSeriesField, TimeSeriesField]


@dataclasses.dataclass(frozen=True, eq=False)
class InitialData:
    a0: SpectralField
    u0: SpectralField
    d0: SpectralField


def _phase(grid: Grid, axis: int) -> RealArray:
    return grid.fundamental_frequency * grid.coordinates()[axis]


def _unit_director(grid: Grid, axis: int = 0) -> SpectralField:
    vector = [0.0] * grid.dim
    vector[axis] = 1.0
    return SpectralField.constant(grid, vector)


def _vortex_profile(grid: Grid) -> SpectralField:
    """(sin x1 cos x2, −cos x1 sin x2, 0) in units of the fundamental frequency."""
    x1, x2 = _phase(grid, 0), _phase(grid, 1)
    values = np.zeros((grid.dim, *grid.shape))
    values[0] = np.sin(x1) * np.cos(x2)
    values[1] = -np.cos(x1) * np.sin(x2)
    return SpectralField(grid=grid, values=values)


def _constant_in_time(field: SpectralField, times: RealArray) -> TimeSeriesField:
    values = np.broadcast_to(field.values, (times.size, *field.values.shape))
    return TimeSeriesField(grid=field.grid, times=times, values=values)


class Scenario(abc.ABC):
    """
    Named generator of initial data (a0, u0, d0) with its parameters.

    Analytic scenarios come with an exact solution and are exempt from the smallness threshold.

    :cvar name: Registry key.
    :cvar analytic: Whether :meth:`expected` returns an exact solution.
    :cvar defaults: Accepted parameters with their default values.
    """

    name: typing.ClassVar[str]
    analytic: typing.ClassVar[bool] = False
    defaults: typing.ClassVar[dict[str, float]] = {}

    def __init_subclass__(cls, **kwargs: typing.Any) -> None:
        super().__init_subclass__(**kwargs)
        if abc.ABC in cls.__bases__:
            return
        name = getattr(cls, "name", None)
        if not isinstance(name, str) or not name:
            raise ValueError(f"Scenario {cls.__name__} must define a non-empty 'name' class variable")
        if name in SCENARIO_REGISTRY:
            raise ValueError(f"Scenario name {name!r} is already taken by {SCENARIO_REGISTRY[name].__name__}")
        SCENARIO_REGISTRY[name] = cls

    def __init__(self, parameters: typing.Mapping[str, float] | None = None, seed: int = 0) -> None:
        given = dict(parameters or {})
        unknown = sorted(set(given) - set(self.defaults))
        if unknown:
            raise ConfigurationError(f"data.parameters: scenario {self.name!r} has no parameter(s) {unknown}")
        self.parameters = {**self.defaults, **given}
        self.seed = seed

    @abc.abstractmethod
    def fields(self, grid: Grid, scheme: SchemeSection) -> InitialData:
        """Raw initial fields before the velocity is projected."""

    def initial_data(self, grid: Grid, scheme: SchemeSection) -> InitialData:
        """The fields of :meth:`fields` with a mean-zero, divergence-free velocity."""
        data = self.fields(grid, scheme)
        return dataclasses.replace(data, u0=leray_project(data.u0.without_mean()))

    def expected(
        self, data: InitialData, times: RealArray, constants: PhysicalConstants  # noqa: ARG002
    ) -> ExactSolution | None:
        """Exact velocity and director on ``times``, when known."""
        return None

    def scheme_for(self, scheme: SchemeSection) -> SchemeSection:
        if self.analytic and scheme.smallness == "enforce":
            logging.warning(f"[CLI] Scenario {self.name} is an analytic oracle; smallness is only reported")
            return scheme.model_copy(update={"smallness": "warn"})
        return scheme


class ZeroScenario(Scenario):
    name = "zero"
    analytic = True

    @typing.override
    def fields(self, grid: Grid, scheme: SchemeSection) -> InitialData:
        return InitialData(
            a0=SpectralField.zeros(grid), u0=SpectralField.zeros(grid, grid.dim), d0=_unit_director(grid)
        )

    @typing.override
    def expected(self, data: InitialData, times: RealArray, constants: PhysicalConstants) -> ExactSolution:
        return _constant_in_time(data.u0, times), _constant_in_time(data.d0, times)


class StationaryDirectorScenario(Scenario):
    """
    Planar director d0 = (cos m x1, sin m x1, 0) at rest. It is a harmonic map whose stress is constant,
    so (0, d0) is a steady solution.
    """

    name = "stationary_director"
    analytic = True
    defaults: typing.ClassVar[dict[str, float]] = {"m": 1.0}

    @typing.override
    def fields(self, grid: Grid, scheme: SchemeSection) -> InitialData:
        m = self.parameters["m"]
        if not float(m).is_integer():
            raise ConfigurationError(f"data.parameters.m: the winding number must be an integer, got {m}")
        angle = m * _phase(grid, 0)
        values = np.zeros((grid.dim, *grid.shape))
        values[0], values[1] = np.cos(angle), np.sin(angle)
        return InitialData(
            a0=SpectralField.zeros(grid),
            u0=SpectralField.zeros(grid, grid.dim),
            d0=SpectralField(grid=grid, values=values),
        )

    @typing.override
    def expected(self, data: InitialData, times: RealArray, constants: PhysicalConstants) -> ExactSolution:
        return _constant_in_time(data.u0, times), _constant_in_time(data.d0, times)


class TaylorGreenScenario(Scenario):
    """Decaying vortex u(t) = e^{−2νk²t}u0 under a constant director and uniform density."""

    name = "taylor_green"
    analytic = True
    defaults: typing.ClassVar[dict[str, float]] = {"amplitude": 1.0}

    @typing.override
    def fields(self, grid: Grid, scheme: SchemeSection) -> InitialData:
        return InitialData(
            a0=SpectralField.zeros(grid),
            u0=self.parameters["amplitude"] * _vortex_profile(grid),
            d0=_unit_director(grid),
        )

    @typing.override
    def expected(self, data: InitialData, times: RealArray, constants: PhysicalConstants) -> ExactSolution:
        rate = 2.0 * constants.nu * data.u0.grid.fundamental_frequency**2
        decay = np.exp(-rate * times)[(...,) + (np.newaxis,) * (data.u0.grid.dim + 1)]
        velocity = TimeSeriesField(grid=data.u0.grid, times=times, values=decay * data.u0.values)
        return velocity, _constant_in_time(data.d0, times)


class MixtureStepDensityScenario(Scenario):
    """
    Two fluids of slightly different densities, a0 = contrast · tanh(κ cos x1), stirred by a weak vortex
    whose critical norm is ``velocity_eta``.
    """

    name = "mixture_step_density"
    defaults: typing.ClassVar[dict[str, float]] = {"kappa": 4.0, "contrast": 0.02, "velocity_eta": 0.01}

    @typing.override
    def fields(self, grid: Grid, scheme: SchemeSection) -> InitialData:
        a0 = self.parameters["contrast"] * np.tanh(self.parameters["kappa"] * np.cos(_phase(grid, 0)))
        profile = leray_project(_vortex_profile(grid))
        size = besov_norm(profile, BesovIndex.critical(grid.dim, scheme.p, scheme.r))
        return InitialData(
            a0=SpectralField(grid=grid, values=a0),
            u0=(self.parameters["velocity_eta"] / size) * profile,
            d0=_unit_director(grid),
        )


class RandomSmallScenario(Scenario):
    """
    Random band-limited data whose size η hits the target ``eta``. A common amplitude s scales the density
    perturbation, the velocity and the director tilt d0 = (e1 + sφ)/|e1 + sφ|; s is found by root bracketing.
    """

    name = "random_small"
    defaults: typing.ClassVar[dict[str, float]] = {"eta": 0.01, "band": 3.0}

    def _random_field(self, grid: Grid, rng: np.random.Generator, components: int) -> RealArray:
        modes = family_modes(grid.dim, int(self.parameters["band"]))
        phases = grid.fundamental_frequency * np.tensordot(modes, grid.coordinates(), axes=(1, 0))
        decay = 1.0 / (1.0 + np.sum(modes**2, axis=1))
        cosine = rng.standard_normal((components, modes.shape[0])) * decay
        sine = rng.standard_normal((components, modes.shape[0])) * decay
        values = np.tensordot(cosine, np.cos(phases), axes=(1, 0)) + np.tensordot(sine, np.sin(phases), axes=(1, 0))
        return values / np.max(np.abs(values))  # type: ignore[no-any-return]

    @typing.override
    def fields(self, grid: Grid, scheme: SchemeSection) -> InitialData:
        target = self.parameters["eta"]
        if target <= 0.0:
            raise ConfigurationError(f"data.parameters.eta: the target size must be positive, got {target}")
        rng = np.random.default_rng(self.seed)
        density = self._random_field(grid, rng, 1)
        velocity = leray_project(SpectralField(grid=grid, values=self._random_field(grid, rng, grid.dim)))
        tilt = self._random_field(grid, rng, grid.dim)
        axis = _unit_director(grid).values

        def scaled(s: float) -> InitialData:
            director = axis + s * tilt
            director = director / pointwise_magnitude(director, grid.dim)[np.newaxis]
            return InitialData(
                a0=SpectralField(grid=grid, values=s * density),
                u0=s * velocity,
                d0=SpectralField(grid=grid, values=director),
            )

        def excess(s: float) -> float:
            data = scaled(s)
            return smallness_eta(data.a0, data.u0, data.d0, scheme.p, scheme.r) - target

        upper = 1e-3
        for _ in range(BRACKET_DOUBLINGS):
            if excess(upper) >= 0.0:
                break
            upper *= 2.0
        else:
            raise ConfigurationError(f"data.parameters.eta: no amplitude reaches η = {target}")
        amplitude = scipy.optimize.brentq(excess, 0.0, upper, xtol=1e-14, rtol=1e-12)
        logging.debug(f"[CLI] Random data amplitude {amplitude:.6e} for η = {target}")
        return scaled(float(amplitude))


def scenario(name: str, parameters: typing.Mapping[str, float] | None = None, seed: int = 0) -> Scenario:
    """
    Instantiate a registered scenario.

    :raises UnknownScenarioError: When no scenario carries ``name``.
    """
    if name not in SCENARIO_REGISTRY:
        known = ", ".join(sorted(SCENARIO_REGISTRY))
        raise UnknownScenarioError(f"Unknown scenario {name!r}; known: {known}")
    return SCENARIO_REGISTRY[name](parameters, seed)


def relative_gap(values: RealArray, reference: RealArray) -> float:
    """Largest pointwise gap over max(1, largest reference magnitude)."""
    return float(np.max(np.abs(values - reference)) / max(1.0, float(np.max(np.abs(reference)))))

