"""
Catalogue of Duhamel bounds exercised on random families.

Each entry maps a lemma identifier to the exponent pairs it claims to be bounded and the hypotheses
those exponents must satisfy. The bounds are estimated empirically: ratios of output to input norms
over a random family, compared between a base and a doubled resolution.
"""

from __future__ import annotations

import itertools
import logging
import math
import typing
from collections.abc import Callable

import numpy as np
from pydantic import Field

from nematiclab.common.exceptions import HypothesisViolationError
from nematiclab.config.settings.defaults import DEFAULT_SCHEME_R
from nematiclab.config.settings.services import LabConfiguration
from nematiclab.domain.base import FrozenModel
from nematiclab.domain.grid import Grid
from nematiclab.domain.indices import WeightedExponentTable, reciprocal
from nematiclab.duhamel.operators import DuhamelOperator, apply_operator
from nematiclab.duhamel.series import TimeSeriesField, weighted_norm
from nematiclab.spectral.kernels import RealArray

DEFAULT_WEIGHTED_R = 2.5
DEFAULT_EPSILON = 0.25
FAMILY_BAND = 3
TEMPORAL_MODES = 3


class SeriesNorm(FrozenModel):
    """Norm ‖t^w f‖_{L^r_t L^p_x}."""

    weight: float = 0.0
    time_index: float = Field(ge=1.0)
    space_index: float = Field(ge=1.0)

    def of(self, series: TimeSeriesField) -> float:
        return weighted_norm(series, self.weight, self.space_index, self.time_index)

    def __str__(self) -> str:
        weight = f"t^{self.weight:.4g} " if self.weight else ""
        return f"{weight}L^{self.time_index:.4g}_t L^{self.space_index:.4g}_x"


class BoundPair(FrozenModel):
    operator: DuhamelOperator
    source: SeriesNorm
    target: SeriesNorm

    @property
    def label(self) -> str:
        return f"{self.operator}: {self.source} -> {self.target}"


class LemmaCase(FrozenModel):
    name: str
    pairs: tuple[BoundPair, ...]


class LemmaSettings(FrozenModel):
    """
    Free exponents from which every lemma case is built.

    :ivar dim: Spatial dimension N.
    :ivar scheme_r: Time index of the unweighted space, in (1, 2).
    :ivar weighted_r: Time index r of the weighted space; the lemmas use r̄ = 2r.
    :ivar p1: Lebesgue index of second derivatives in the weighted space.
    :ivar p3: Lebesgue index of (u, ∇d) in the weighted space.
    :ivar epsilon: Regularity shift of the uniqueness variants.
    """

    dim: int = Field(ge=2, le=3)
    scheme_r: float = DEFAULT_SCHEME_R
    weighted_r: float = DEFAULT_WEIGHTED_R
    p1: float
    p3: float
    epsilon: float = DEFAULT_EPSILON

    @classmethod
    def for_dim(cls, dim: int) -> LemmaSettings:
        return cls(dim=dim, p1=0.8 * dim, p3=4.0 * dim)

    @property
    def table(self) -> WeightedExponentTable:
        return WeightedExponentTable.from_indices(self.dim, self.weighted_r, self.p1, self.p3)

    @property
    def epsilon_table(self) -> WeightedExponentTable:
        return WeightedExponentTable.from_indices(self.dim, self.weighted_r, self.p1, self.p3, self.epsilon)

    @property
    def r_bar(self) -> float:
        return 2.0 * self.weighted_r


LemmaBuilder = Callable[[LemmaSettings], LemmaCase]
LEMMA_BUILDERS: dict[str, LemmaBuilder] = {}


def register_lemma(name: str) -> Callable[[LemmaBuilder], LemmaBuilder]:
    def _register(builder: LemmaBuilder) -> LemmaBuilder:
        LEMMA_BUILDERS[name] = builder
        return builder

    return _register


def require(lemma: str, condition: bool, statement: str) -> None:
    """Raise :class:`HypothesisViolationError` naming the violated inequality."""
    if not condition:
        raise HypothesisViolationError(f"Lemma {lemma}: hypothesis {statement} is violated")


def lemma_case(name: str, settings: LemmaSettings) -> LemmaCase:
    if name not in LEMMA_BUILDERS:
        raise HypothesisViolationError(f"Unknown lemma {name!r}; known: {', '.join(LEMMA_BUILDERS)}")
    return LEMMA_BUILDERS[name](settings)


Exponents = tuple[float, float, float]


def _pair(operator: DuhamelOperator, source: Exponents, target: Exponents) -> BoundPair:
    """Pair of (weight, time index, space index) triples."""
    return BoundPair(
        operator=operator,
        source=SeriesNorm(weight=source[0], time_index=source[1], space_index=source[2]),
        target=SeriesNorm(weight=target[0], time_index=target[1], space_index=target[2]),
    )


@register_lemma("2.2")
def maximal_regularity(settings: LemmaSettings) -> LemmaCase:  # noqa: ARG001
    pairs = ((2.0, 2.0), (4.0 / 3.0, 4.0), (3.0, 1.5))
    return LemmaCase(
        name="2.2",
        pairs=tuple(_pair(DuhamelOperator.A, (0.0, p, q), (0.0, p, q)) for p, q in pairs),
    )


@register_lemma("2.3")
def gradient_convolution(settings: LemmaSettings) -> LemmaCase:
    n, r = settings.dim, settings.scheme_r
    r1, r2 = 6.0 * r / 5.0, 3.0 * r
    q1, q2 = 3.0 * n * r / (6.0 * r - 5.0), 3.0 * n * r / (3.0 * r - 2.0)
    gap = 0.5 * n * (1.0 / q1 - 1.0 / q2)
    require("2.3", 1.0 < r1 and 1.0 < r2 and 1.0 <= q1 <= q2, "1 < r1, r2 and 1 <= q1 <= q2")
    require("2.3", gap + 0.5 < 1.0, "(N/2)(1/q1 - 1/q2) + 1/2 < 1")
    require("2.3", math.isclose(1.0 / r1 + gap, 0.5 + 1.0 / r2), "1/r1 + (N/2)(1/q1 - 1/q2) = 1/2 + 1/r2")
    return LemmaCase(name="2.3", pairs=(_pair(DuhamelOperator.B, (0.0, r1, q1), (0.0, r2, q2)),))


@register_lemma("2.4")
def heat_convolution(settings: LemmaSettings) -> LemmaCase:
    n, r, eps = settings.dim, settings.scheme_r, settings.epsilon
    r1, r2 = 4.0 * r / (4.0 - eps), 4.0 * r / (2.0 - eps)
    q1, q2 = n * r / (3.0 * r - 2.0), n * r / (r - 1.0)
    gap = 0.5 * n * (1.0 / q1 - 1.0 / q2)
    require("2.4", 1.0 < r1 and 1.0 < r2 and 1.0 <= q1 <= q2, "1 < r1, r2 and 1 <= q1 <= q2")
    require("2.4", gap < 1.0, "(N/2)(1/q1 - 1/q2) < 1")
    require("2.4", math.isclose(1.0 / r1 + gap, 1.0 + 1.0 / r2), "1/r1 + (N/2)(1/q1 - 1/q2) = 1 + 1/r2")
    return LemmaCase(name="2.4", pairs=(_pair(DuhamelOperator.C, (0.0, r1, q1), (0.0, r2, q2)),))


@register_lemma("2.5")
def weighted_maximal_regularity(settings: LemmaSettings) -> LemmaCase:
    r_bar, q, alpha = settings.r_bar, settings.p1, settings.table.alpha1
    require("2.5", 0.0 < alpha < 1.0 - 1.0 / r_bar, "0 < alpha < 1 - 1/r")
    return LemmaCase(name="2.5", pairs=(_pair(DuhamelOperator.A, (alpha, r_bar, q), (alpha, r_bar, q)),))


def _weighted_heat_pairs(lemma: str, settings: LemmaSettings, table: WeightedExponentTable) -> tuple[BoundPair, ...]:
    n, r_bar, q, q_tilde = settings.dim, settings.r_bar, table.p1, table.p3
    upper = n / (1.0 - table.epsilon)
    require(lemma, n / 2.0 < q < upper, f"N/2 < q < {upper:g}")
    require(lemma, max(n, q) < q_tilde, "max(N, q) < q~")
    pairs = [_pair(DuhamelOperator.C, (table.alpha1, r_bar, q), (table.gamma1, r_bar, q_tilde))]
    if r_bar > 2.0 and n * r_bar / (2.0 * r_bar - 2.0) < q:
        pairs.append(_pair(DuhamelOperator.C, (table.alpha1, r_bar, q), (table.gamma2, math.inf, q_tilde)))
    return tuple(pairs)


def _weighted_gradient_pairs(
    lemma: str, settings: LemmaSettings, table: WeightedExponentTable
) -> tuple[BoundPair, ...]:
    n, r_bar, q, q_bar = settings.dim, settings.r_bar, table.p1, table.p2
    upper = n / (1.0 - table.epsilon)
    require(lemma, n / 2.0 < q < upper, f"N/2 < q < {upper:g}")
    require(lemma, q <= q_bar and 1.0 / q - 1.0 / q_bar < 1.0 / n, "q <= q_bar and 1/q - 1/q_bar < 1/N")
    pairs = [_pair(DuhamelOperator.B, (table.alpha1, r_bar, q), (table.beta1, r_bar, q_bar))]
    if r_bar > 2.0 and n * r_bar / (2.0 * r_bar - 2.0) < q and q_bar < n * settings.weighted_r:
        pairs.append(_pair(DuhamelOperator.B, (table.alpha1, r_bar, q), (table.beta2, math.inf, q_bar)))
    return tuple(pairs)


@register_lemma("2.6")
def weighted_heat_convolution(settings: LemmaSettings) -> LemmaCase:
    return LemmaCase(name="2.6", pairs=_weighted_heat_pairs("2.6", settings, settings.table))


@register_lemma("2.7")
def weighted_gradient_convolution(settings: LemmaSettings) -> LemmaCase:
    return LemmaCase(name="2.7", pairs=_weighted_gradient_pairs("2.7", settings, settings.table))


@register_lemma("A.1")
def shifted_heat_convolution(settings: LemmaSettings) -> LemmaCase:
    return LemmaCase(name="A.1", pairs=_weighted_heat_pairs("A.1", settings, settings.epsilon_table))


@register_lemma("A.2")
def shifted_gradient_convolution(settings: LemmaSettings) -> LemmaCase:
    return LemmaCase(name="A.2", pairs=_weighted_gradient_pairs("A.2", settings, settings.epsilon_table))


@register_lemma("A.3")
def bounded_heat_convolution(settings: LemmaSettings) -> LemmaCase:
    n, r_bar, q = settings.dim, settings.r_bar, settings.p1
    require("A.3", q > n * r_bar / (2.0 * r_bar - 2.0), "q > N r/(2r - 2)")
    sigma = 1.0 - n / (2.0 * q) - 1.0 / r_bar
    return LemmaCase(name="A.3", pairs=(_pair(DuhamelOperator.C, (sigma, r_bar, q), (0.0, math.inf, math.inf)),))


@register_lemma("A.4")
def bounded_gradient_convolution(settings: LemmaSettings) -> LemmaCase:
    n, r_bar, q = settings.dim, settings.r_bar, settings.p3
    require("A.4", r_bar > 2.0, "r > 2")
    require("A.4", q > n * r_bar / (r_bar - 2.0), "q > N r/(r - 2)")
    sigma = 0.5 * (1.0 - n * reciprocal(q)) - 1.0 / r_bar
    return LemmaCase(
        name="A.4",
        pairs=(
            _pair(DuhamelOperator.B, (sigma, r_bar, q), (0.0, math.inf, math.inf)),
            _pair(DuhamelOperator.C, (sigma, r_bar, q), (-0.5, math.inf, math.inf)),
        ),
    )


def family_modes(dim: int, band: int = FAMILY_BAND) -> RealArray:
    """Nonzero integer mode vectors with entries in [−band, band], in a fixed order."""
    modes = [mode for mode in itertools.product(range(-band, band + 1), repeat=dim) if any(mode)]
    return np.asarray(modes, dtype=np.float64)


def random_time_family(
    grid: Grid,
    times: RealArray,
    count: int,
    seed: int = 0,
    components: int = 1,
    band: int = FAMILY_BAND,
) -> list[TimeSeriesField]:
    """
    Mean-zero trigonometric polynomials in space with smooth random time profiles.

    The random draws depend only on ``seed``, ``count``, ``components`` and ``band``, so the same continuous
    family is sampled on any grid and time grid over the same horizon.

    :param grid: Spatial grid, with more than 2·band points per axis.
    :param times: Time levels starting at 0.
    :param count: Number of members.
    :param seed: Seed of the generator.
    :param components: Components of every member.
    :param band: Largest integer mode per axis.
    :return: The family.
    """
    rng = np.random.default_rng(seed)
    modes = family_modes(grid.dim, band)
    phases = grid.fundamental_frequency * np.tensordot(modes, grid.coordinates(), axes=(1, 0))
    cosines, sines = np.cos(phases), np.sin(phases)
    decay = 1.0 / (1.0 + np.sum(modes**2, axis=1))
    scaled = np.asarray(times) / max(float(times[-1]), 1e-300)
    temporal = np.stack([np.cos(math.pi * j * scaled) for j in range(TEMPORAL_MODES)], axis=1)
    family = []
    for _ in range(count):
        shape = (components, modes.shape[0], TEMPORAL_MODES)
        cosine_amplitudes = np.einsum("tj,cmj->tcm", temporal, rng.standard_normal(shape)) * decay
        sine_amplitudes = np.einsum("tj,cmj->tcm", temporal, rng.standard_normal(shape)) * decay
        values = np.tensordot(cosine_amplitudes, cosines, axes=(2, 0))
        values += np.tensordot(sine_amplitudes, sines, axes=(2, 0))
        family.append(TimeSeriesField(grid=grid, times=times, values=values))
    return family


class BoundRow(FrozenModel):
    pair: str
    trial: int
    ratio: float


class BoundReport(FrozenModel):
    lemma: str
    rows: tuple[BoundRow, ...]

    def maxima(self) -> dict[str, float]:
        result: dict[str, float] = {}
        for row in self.rows:
            result[row.pair] = max(result.get(row.pair, 0.0), row.ratio)
        return result


def weighted_bound_report(case: LemmaCase, family: typing.Sequence[TimeSeriesField]) -> BoundReport:
    """
    Ratio of output to input norm for every pair of a lemma and every family member.

    :param case: The lemma with its operators and weighted exponent pairs.
    :param family: Input series.
    :return: One row per (pair, member); a vanishing input gives ratio 0.
    """
    rows = []
    for trial, member in enumerate(family):
        outputs: dict[DuhamelOperator, TimeSeriesField] = {}
        for pair in case.pairs:
            if pair.operator not in outputs:
                outputs[pair.operator] = apply_operator(pair.operator, member)
            denominator = pair.source.of(member)
            ratio = pair.target.of(outputs[pair.operator]) / denominator if denominator > 0.0 else 0.0
            rows.append(BoundRow(pair=pair.label, trial=trial, ratio=ratio))
    return BoundReport(lemma=case.name, rows=tuple(rows))


class LemmaRow(FrozenModel):
    pair: str
    trial: int
    base_ratio: float
    refined_ratio: float


class LemmaVerdict(FrozenModel):
    lemma: str
    rows: tuple[LemmaRow, ...]
    base_maxima: dict[str, float]
    refined_maxima: dict[str, float]
    drift: dict[str, float]
    tolerance: float
    passed: bool


def verify_lemma(
    name: str,
    grid: Grid,
    levels: int = 64,
    horizon: float = 1.0,
    trials: int = 10,
    seed: int = 0,
    settings: LemmaSettings | None = None,
) -> LemmaVerdict:
    """
    Estimate the bound constants of a lemma and check their stability when M and K double.

    :param name: Lemma identifier such as ``"2.6"``.
    :param grid: Base grid; the refined run doubles its points per axis.
    :param levels: Base number of time steps K; the refined run uses 2K.
    :param horizon: Final time T.
    :param trials: Family size.
    :param seed: Family seed shared by both resolutions.
    :param settings: Exponent settings, by default those of the grid dimension.
    :return: Per-trial ratios, their maxima and relative drift, PASS when all are finite and drift is small.
    """
    case = lemma_case(name, settings or LemmaSettings.for_dim(grid.dim))
    with LabConfiguration.use() as config:
        tolerance = config.resolution_drift
    reports = []
    for resolution_grid, steps in ((grid, levels), (grid.refined(), 2 * levels)):
        times = np.linspace(0.0, horizon, steps + 1)
        family = random_time_family(resolution_grid, times, trials, seed)
        reports.append(weighted_bound_report(case, family))
    base, refined = reports
    base_maxima, refined_maxima = base.maxima(), refined.maxima()
    drift = {
        pair: abs(refined_maxima[pair] - value) / value if value > 0.0 else abs(refined_maxima[pair])
        for pair, value in base_maxima.items()
    }
    finite = all(math.isfinite(value) for value in (*base_maxima.values(), *refined_maxima.values()))
    passed = finite and all(value < tolerance for value in drift.values())
    rows = tuple(
        LemmaRow(pair=first.pair, trial=first.trial, base_ratio=first.ratio, refined_ratio=second.ratio)
        for first, second in zip(base.rows, refined.rows, strict=True)
    )
    for pair, value in drift.items():
        logging.info(f"[DUHAMEL] Lemma {name} {pair}: max ratio {base_maxima[pair]:.4e}, drift {value:.3f}")
    return LemmaVerdict(
        lemma=name,
        rows=rows,
        base_maxima=base_maxima,
        refined_maxima=refined_maxima,
        drift=drift,
        tolerance=tolerance,
        passed=passed,
    )
