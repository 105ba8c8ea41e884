"""
Pipelines behind the subcommands. Each writes its artefacts under the output directory and returns a verdict.
"""

import logging
import math
import typing
from pathlib import Path

import numpy as np

from nematiclab.besov.norms import (
    besov_norm,
    block_norms,
    critical_scaling_ratio,
    embedding_ratio,
    heat_characterization_norm,
)
from nematiclab.cli import outputs
from nematiclab.cli.scenarios import InitialData, Scenario, TaylorGreenScenario, relative_gap, scenario
from nematiclab.common.exceptions import ConfigurationError, GridMismatchError
from nematiclab.config.settings.defaults import (
    ANALYTIC_THRESHOLD,
    CRITICAL_INVARIANCE_THRESHOLD,
    DEFAULT_SCHEME_P,
    DEFAULT_SCHEME_R,
    DELTA_A_THRESHOLD,
    DIRECT_INVERSE_THRESHOLD,
    GRADIENT_IDENTITY_THRESHOLD,
    HEAT_EQUIVALENCE_CONSTANT,
    L2_EQUIVALENCE_BAND,
    LAGRANGIAN_RESIDUAL_THRESHOLD,
    REFINEMENT_HALVINGS,
    SERIES_INVERSE_THRESHOLD,
    VOLUME_THRESHOLD,
)
from nematiclab.config.settings.run import RunConfiguration, SchemeSection
from nematiclab.config.settings.services import LabConfiguration
from nematiclab.diagnostics.refinement import refinement_study, refinement_suites
from nematiclab.diagnostics.verdict import diagnostics_verdict, suite, write_verdict
from nematiclab.domain.grid import Grid, PhysicalConstants
from nematiclab.domain.indices import BesovIndex
from nematiclab.domain.reports import InverseSource, SuiteResult, Verdict
from nematiclab.duhamel.lemmas import LEMMA_BUILDERS, random_time_family, verify_lemma
from nematiclab.duhamel.series import TimeSeriesField
from nematiclab.lagrangian.flow import FlowMap, flow_map
from nematiclab.lagrangian.transform import lagrangian_identities, lagrangian_residual_profiles, to_lagrangian
from nematiclab.lagrangian.uniqueness import delta_A_identity
from nematiclab.solver.ledger import x_norm_ledger, y_norm_ledger
from nematiclab.solver.picard import picard_solve
from nematiclab.solver.state import Trajectory, load_trajectory, save_trajectory
from nematiclab.spectral.field import SpectralField
from nematiclab.spectral.kernels import RealArray
from nematiclab.spectral.snapshot_io import read_snapshot

LAGRANGIAN_CHECKS = ("identities", "residuals", "deltaA")

BESOV_HEAT_INDICES = (BesovIndex(s=-1.0, p=2.0, r=2.0), BesovIndex(s=-0.5, p=4.0, r=4.0))
BESOV_EMBEDDING = (BesovIndex(s=0.5, p=2.0, r=2.0), BesovIndex(s=0.0, p=4.0, r=4.0))
SINGLE_MODE_LEVELS = (1, 2, 3, 4)

DELTA_A_AMPLITUDE = 0.02


def _verdict(name: str, suites: typing.Iterable[SuiteResult]) -> Verdict:
    verdict = Verdict(suites=tuple(suites))
    for failed in (item for item in verdict.suites if not item.passed):
        logging.error(f"[CLI] {name}: suite {failed.name} scored {failed.value:.3e} against {failed.threshold:.3e}")
    return verdict


def _read_field(path: Path, grid: Grid, label: str) -> SpectralField:
    field, _ = read_snapshot(path)
    try:
        field.require_same_grid(grid)
    except GridMismatchError as error:
        raise ConfigurationError(f"data.snapshots.{label}: {error}") from error
    return field


def initial_data(configuration: RunConfiguration) -> tuple[InitialData, Scenario | None, SchemeSection]:
    """
    Initial fields of a run: read from snapshots, or generated by the configured scenario.

    :return: The data, the scenario when one was used, and the scheme adjusted by the scenario.
    """
    grid = configuration.grid.build()
    data, scheme = configuration.data, configuration.scheme
    if data.snapshots is not None:
        fields = {label: _read_field(getattr(data.snapshots, label), grid, label) for label in ("a", "u", "d")}
        return InitialData(a0=fields["a"], u0=fields["u"], d0=fields["d"]), None, scheme
    if data.scenario is None:
        raise ConfigurationError("data: give a scenario or snapshot paths")
    model = scenario(data.scenario, data.parameters, data.seed)
    scheme = model.scheme_for(scheme)
    return model.initial_data(grid, scheme), model, scheme


def analytic_suites(trajectory: Trajectory, model: Scenario, data: InitialData) -> list[SuiteResult]:
    exact = model.expected(data, trajectory.times, trajectory.constants)
    if exact is None:
        return []
    velocity, director = exact
    return [
        suite("analytic_velocity", relative_gap(trajectory.u.values, velocity.values), ANALYTIC_THRESHOLD),
        suite("analytic_director", relative_gap(trajectory.d.values, director.values), ANALYTIC_THRESHOLD),
    ]


def simulate(configuration: RunConfiguration, out: Path) -> Verdict:
    """
    Solve a configured run, store the trajectory with its iteration, ledger and diagnostics tables,
    and grade it.

    :param configuration: Validated run file.
    :param out: Output directory.
    :return: Convergence, diagnostics and, for analytic scenarios, exact-solution suites.
    """
    data, model, scheme = initial_data(configuration)
    outputs.write_resolved_configuration(configuration, out)
    trajectory, reports = picard_solve(data.a0, data.u0, data.d0, scheme, configuration.constants)
    save_trajectory(trajectory, out / outputs.TRAJECTORY_DIRECTORY, configuration.output.stride)
    outputs.write_iterations(reports, out)
    if scheme.uses_unweighted_ledger:
        ledger = x_norm_ledger(trajectory, scheme.r)
    else:
        ledger = y_norm_ledger(trajectory, scheme.weighted_table(trajectory.grid.dim), scheme.p)
    outputs.write_ledger(ledger, out)

    diagnostics, rows = diagnostics_verdict(trajectory)
    outputs.write_diagnostics(rows, out)
    suites = [suite("picard_converged", reports[-1].delta_U, scheme.tol, f"{len(reports)} iteration(s)")]
    if model is not None:
        suites.extend(analytic_suites(trajectory, model, data))
    verdict = _verdict("simulate", suites).merged(diagnostics)
    write_verdict(verdict, out)
    return verdict


def verify_refinement(configuration: RunConfiguration, out: Path, halvings: int = REFINEMENT_HALVINGS) -> Verdict:
    """
    Solve a run file at its time step and at ``halvings`` successive halvings of it, and grade the observed
    orders of the energy-law residual, the weak-form residual and the sphere drift.
    """
    data, _, scheme = initial_data(configuration)
    outputs.write_resolved_configuration(configuration, out)
    levels = refinement_study(data.a0, data.u0, data.d0, scheme, configuration.constants, halvings)
    outputs.write_refinement(levels, out)
    return _verdict("verify refinement", refinement_suites(levels))


def verify_duhamel(
    lemmas: typing.Sequence[str], trials: int, out: Path, seed: int = 0, points: int = 16, levels: int = 32
) -> Verdict:
    """
    Bound constants of the Duhamel lemmas at two resolutions, one CSV per lemma and a summary table.

    :param lemmas: Lemma identifiers, e.g. ``("2.2", "A.1")``.
    :param trials: Size of the random family.
    :param out: Output directory.
    :param seed: Family seed.
    :param points: Base points per axis.
    :param levels: Base number of time steps.
    """
    unknown = [name for name in lemmas if name not in LEMMA_BUILDERS]
    if unknown:
        raise ConfigurationError(f"--lemma: unknown lemma(s) {unknown}; known: {', '.join(LEMMA_BUILDERS)}")
    grid = Grid(dim=2, points_per_axis=points)
    summary: list[dict[str, typing.Any]] = []
    suites: list[SuiteResult] = []
    for name in lemmas:
        verdict = verify_lemma(name, grid, levels=levels, trials=trials, seed=seed)
        outputs.write_lemma(verdict, out)
        summary.extend(
            {
                "lemma": name,
                "pair": pair,
                "base_max": verdict.base_maxima[pair],
                "refined_max": verdict.refined_maxima[pair],
                "drift": drift,
            }
            for pair, drift in verdict.drift.items()
        )
        worst = max(verdict.drift.values(), default=0.0)
        suites.append(
            SuiteResult(
                name=f"duhamel_{name}",
                passed=verdict.passed,
                value=worst,
                threshold=verdict.tolerance,
                detail=f"largest ratio {max(verdict.base_maxima.values(), default=0.0):.4e}",
            )
        )
    outputs.write_rows(out / "duhamel_summary.csv", summary)
    return _verdict("verify duhamel", suites)


def band_limited_family(grid: Grid, count: int, seed: int) -> list[SpectralField]:
    """Random mean-zero trigonometric polynomials, the same draws on every grid."""
    family = random_time_family(grid, np.zeros(1), count, seed)
    return [member.at(0) for member in family]


def single_modes(grid: Grid) -> list[SpectralField]:
    """cos(2^q x1) for the dyadic levels that fit below the Nyquist frequency."""
    phase = grid.fundamental_frequency * grid.coordinates()[0]
    nyquist = grid.points_per_axis // 2
    return [
        SpectralField(grid=grid, values=np.cos(2**q * phase))
        for q in SINGLE_MODE_LEVELS
        if 2**q < nyquist
    ]


def _relative_drift(base: float, refined: float) -> float:
    return abs(refined - base) / base if base > 0.0 else abs(refined)


def verify_besov(out: Path, trials: int = 20, seed: int = 0, points: int = 64) -> Verdict:
    """
    Heat-flow equivalence, L² comparison, embedding and critical scaling over random band-limited fields
    and single dyadic modes, at ``points`` and twice as many points per axis.
    """
    with LabConfiguration.use() as config:
        drift_tolerance = config.resolution_drift
    rows: list[dict[str, typing.Any]] = []
    spreads: list[float] = []
    embeddings: list[float] = []
    worst_equivalence, low, high, worst_scaling = 1.0, math.inf, 0.0, 0.0
    for resolution in (points, 2 * points):
        grid = Grid(dim=2, points_per_axis=resolution)
        fields = band_limited_family(grid, trials, seed) + single_modes(grid)
        ratios: list[float] = []
        for number, field in enumerate(fields):
            for index in BESOV_HEAT_INDICES:
                besov = besov_norm(field, index)
                heat = heat_characterization_norm(field, index)
                ratio = heat / besov
                ratios.append(ratio)
                worst_equivalence = max(worst_equivalence, ratio, 1.0 / ratio)
                rows.append(
                    {"points": resolution, "field": number, "index": str(index), "besov": besov, "heat": heat}
                )
            l2_ratio = besov_norm(field, BesovIndex(s=0.0, p=2.0, r=2.0)) / field.norm(2.0)
            low, high = min(low, l2_ratio), max(high, l2_ratio)
            worst_scaling = max(
                worst_scaling, abs(critical_scaling_ratio(field, DEFAULT_SCHEME_P, DEFAULT_SCHEME_R) - 1.0)
            )
        spreads.append(max(ratios) / min(ratios))
        embeddings.append(max(embedding_ratio(field, *BESOV_EMBEDDING) for field in fields))
    outputs.write_rows(out / "besov_equivalence.csv", rows)

    band_low, band_high = L2_EQUIVALENCE_BAND
    band_excess = max(band_low - low, high - band_high, 0.0)
    return _verdict(
        "verify besov",
        [
            suite("besov_heat_equivalence", worst_equivalence, HEAT_EQUIVALENCE_CONSTANT, "max(ratio, 1/ratio)"),
            suite("besov_heat_stability", _relative_drift(*spreads), drift_tolerance, f"spreads {spreads}"),
            suite("besov_l2_band", band_excess, 0.0, f"ratios in [{low:.4f}, {high:.4f}]"),
            suite("besov_embedding_stability", _relative_drift(*embeddings), drift_tolerance, f"{embeddings}"),
            suite("besov_critical_scaling", worst_scaling, CRITICAL_INVARIANCE_THRESHOLD),
        ],
    )


def besov_report(snapshot: Path, index: BesovIndex, out: Path, heat: bool = False) -> Path:
    """
    Per-block L^p norms of a stored field and its Besov norm, optionally with the heat characterization.

    :param snapshot: ELF1 file.
    :param index: The Besov index (s, p, r).
    :param out: Output directory.
    :param heat: Add the heat-flow value and its ratio to the norm, which needs s < 0.
    :return: The CSV written.
    """
    field, time = read_snapshot(snapshot)
    mean = field.mean()
    if np.any(np.abs(mean) > 0.0):
        logging.info(f"[CLI] Removing the mean {mean} of {snapshot.name} before the dyadic decomposition")
        field = field.without_mean()
    indices, norms = block_norms(field, index.p)
    rows: list[dict[str, typing.Any]] = [
        {"q": q, "block_lp": norm, "weighted": 2.0 ** (index.s * q) * norm}
        for q, norm in zip(indices, norms, strict=True)
    ]
    total = besov_norm(field, index)
    rows.append({"q": "norm", "block_lp": "", "weighted": total})
    if heat:
        value = heat_characterization_norm(field, index)
        rows.append({"q": "heat", "block_lp": "", "weighted": value})
        rows.append({"q": "heat_ratio", "block_lp": "", "weighted": value / total if total > 0.0 else 0.0})
    logging.info(f"[CLI] Besov norm {index} of {snapshot.name} at t = {time:.4e}: {total:.6e}")
    return outputs.write_rows(out / f"besov_{snapshot.stem}.csv", rows)


def identity_suites(identities: typing.Mapping[str, float], flow: FlowMap) -> list[SuiteResult]:
    direct = all(certificate.source is InverseSource.DIRECT for certificate in flow.certificates)
    thresholds = {
        "grad_u": GRADIENT_IDENTITY_THRESHOLD,
        "grad_d": GRADIENT_IDENTITY_THRESHOLD,
        "inverse": DIRECT_INVERSE_THRESHOLD if direct else SERIES_INVERSE_THRESHOLD,
        "volume": VOLUME_THRESHOLD,
        "inverse_map": GRADIENT_IDENTITY_THRESHOLD,
        "transport": GRADIENT_IDENTITY_THRESHOLD,
    }
    return [suite(f"lagrangian_{name}", value, thresholds[name]) for name, value in identities.items()]


def residual_suites(profiles: typing.Mapping[str, RealArray]) -> list[SuiteResult]:
    return [
        suite(f"lagrangian_residual_{name}", float(np.max(profile)), LAGRANGIAN_RESIDUAL_THRESHOLD)
        for name, profile in profiles.items()
    ]


def delta_A_suite(first: TimeSeriesField, second: TimeSeriesField) -> SuiteResult:
    report = delta_A_identity(first, second)
    return suite("lagrangian_delta_A", report.discrepancy, DELTA_A_THRESHOLD, f"|δA| up to {report.delta_A_max:.3e}")


def random_velocity_pair(grid: Grid, times: RealArray, seed: int = 0) -> tuple[TimeSeriesField, TimeSeriesField]:
    """Two small random Lagrangian velocities with sup norm :data:`DELTA_A_AMPLITUDE`."""
    first, second = random_time_family(grid, times, 2, seed, components=grid.dim)
    return tuple(  # type: ignore[return-value]
        member.with_values(member.values * (DELTA_A_AMPLITUDE / float(np.max(np.abs(member.values)))))
        for member in (first, second)
    )


def lagrangian_check(
    directory: Path, check: str, out: Path, against: Path | None = None, require_series: bool = False
) -> Verdict:
    """
    Lagrangian checks of a stored trajectory.

    :param directory: Trajectory directory.
    :param check: ``identities``, ``residuals`` or ``deltaA``.
    :param out: Output directory.
    :param against: Second trajectory, needed by ``deltaA``.
    :param require_series: Refuse the direct inversion of the Jacobians.
    """
    if check not in LAGRANGIAN_CHECKS:
        raise ConfigurationError(f"--check: expected one of {LAGRANGIAN_CHECKS}, got {check!r}")
    trajectory = load_trajectory(directory)
    flow = flow_map(trajectory, require_series)
    state = to_lagrangian(trajectory, flow)
    if check == "identities":
        identities = lagrangian_identities(trajectory, flow, state)
        outputs.write_named_values(out / "lagrangian_identities.csv", identities)
        outputs.write_profiles(
            out / "lagrangian_budget.csv", flow.times, {"lipschitz_budget": flow.lipschitz_budget}
        )
        return _verdict("lagrangian", identity_suites(identities, flow))
    if check == "residuals":
        profiles = lagrangian_residual_profiles(state)
        outputs.write_profiles(out / "lagrangian_residuals.csv", state.times, profiles)
        return _verdict("lagrangian", residual_suites(profiles))
    if against is None:
        raise ConfigurationError("--against: the deltaA check compares two trajectories")
    other = load_trajectory(against)
    other_state = to_lagrangian(other, flow_map(other, require_series))
    return _verdict("lagrangian", [delta_A_suite(state.velocity, other_state.velocity)])


def verify_lagrangian(out: Path, points: int = 64, horizon: float = 0.5, steps: int = 128) -> Verdict:
    """
    Frame identities and Lagrangian residuals of a converged Taylor-Green run, and the δA identity on a pair of
    small random velocities.
    """
    grid = Grid(dim=2, points_per_axis=points)
    scheme = SchemeSection.model_validate({"T": horizon, "dt": horizon / steps, "smallness": "warn"})
    model = TaylorGreenScenario()
    data = model.initial_data(grid, scheme)
    trajectory, _ = picard_solve(data.a0, data.u0, data.d0, scheme, PhysicalConstants())
    flow = flow_map(trajectory)
    state = to_lagrangian(trajectory, flow)
    identities = lagrangian_identities(trajectory, flow, state)
    profiles = lagrangian_residual_profiles(state)
    outputs.write_named_values(out / "lagrangian_identities.csv", identities)
    outputs.write_profiles(out / "lagrangian_residuals.csv", state.times, profiles)
    suites = [
        *identity_suites(identities, flow),
        *residual_suites(profiles),
        delta_A_suite(*random_velocity_pair(grid, scheme.times())),
    ]
    return _verdict("verify lagrangian", suites)


def verify_trajectory(directory: Path, out: Path) -> Verdict:
    """Energy, constraint, weak-form and scaling suites of a stored trajectory."""
    trajectory = load_trajectory(directory)
    verdict, rows = diagnostics_verdict(trajectory)
    outputs.write_diagnostics(rows, out)
    return verdict
