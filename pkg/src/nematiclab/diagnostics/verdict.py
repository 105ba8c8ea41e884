"""
Aggregation of the trajectory diagnostics into PASS/FAIL suites and the ``verdict.txt`` file.
"""

import logging
import typing
from pathlib import Path

import numpy as np

from nematiclab.config.settings.defaults import (
    CRITICAL_INVARIANCE_THRESHOLD,
    DIVERGENCE_THRESHOLD,
    ENERGY_LAW_THRESHOLD,
    MAX_PRINCIPLE_SLACK,
    SCALING_RESIDUAL_RATIO,
    VERDICT_FILENAME,
    WEAK_FORM_THRESHOLD,
)
from nematiclab.config.settings.services import LabConfiguration
from nematiclab.diagnostics.energy import ENERGY_MONOTONICITY_TOLERANCE, energy_report, largest_energy_increase
from nematiclab.diagnostics.scaling import ScalingReport, scaling_check
from nematiclab.domain.reports import DiagnosticsRow, SuiteResult, Verdict
from nematiclab.solver.state import Trajectory
from nematiclab.solver.weak_form import default_test_functions, weak_form_residual


def suite(name: str, value: float, threshold: float, detail: str = "") -> SuiteResult:
    """A suite passing when ``value`` does not exceed ``threshold``; NaN fails."""
    passed = bool(np.isfinite(value)) and value <= threshold
    return SuiteResult(name=name, passed=passed, value=value, threshold=threshold, detail=detail)


def energy_law_residual(rows: typing.Sequence[DiagnosticsRow]) -> float:
    """Largest |dE/dt + dissipation| over the larger of the peak dissipation and the peak energy rate."""
    with LabConfiguration.use() as config:
        floor = config.residual_floor
    dissipation = max(max(row.dissipation for row in rows), max(abs(row.energy_rate) for row in rows))
    return max(row.law_residual for row in rows) / (dissipation + floor) if dissipation > 0.0 else 0.0


def energy_suites(rows: typing.Sequence[DiagnosticsRow]) -> list[SuiteResult]:
    with LabConfiguration.use() as config:
        sphere_tolerance = config.sphere_tolerance
    scale = max(1.0, rows[0].energy)
    law = energy_law_residual(rows)
    a0 = rows[0].a_max
    step = rows[1].time - rows[0].time if len(rows) > 1 else 0.0
    sphere_bound = sphere_tolerance + step + rows[0].sphere_drift
    return [
        suite("energy_monotone", largest_energy_increase(rows) / scale, ENERGY_MONOTONICITY_TOLERANCE),
        suite("energy_law", law, ENERGY_LAW_THRESHOLD, "largest |dE/dt + dissipation| over the dissipation scale"),
        suite("divergence", max(row.div_norm for row in rows), DIVERGENCE_THRESHOLD),
        suite("max_principle", max(row.a_max for row in rows) - a0, MAX_PRINCIPLE_SLACK, f"max|a0| = {a0:.6e}"),
        suite("sphere", max(row.sphere_drift for row in rows), sphere_bound, "bound dt + initial drift"),
    ]


def scaling_suites(report: ScalingReport) -> list[SuiteResult]:
    drift = max((abs(ratio - 1.0) for ratio in report.critical_ratios.values()), default=0.0)
    return [
        suite("scaling_residual", report.ratio, SCALING_RESIDUAL_RATIO, f"λ = 2^{report.lam_power}"),
        suite("scaling_critical", drift, CRITICAL_INVARIANCE_THRESHOLD, "critical norms of the initial data"),
    ]


def diagnostics_verdict(
    trajectory: Trajectory, weak_form_threshold: float = WEAK_FORM_THRESHOLD, lam_power: int = 1
) -> tuple[Verdict, list[DiagnosticsRow]]:
    """
    Run the energy, constraint, weak-form and scaling suites on a stored trajectory.

    :param trajectory: Trajectory to verify.
    :param weak_form_threshold: Accepted normalized weak-form residual.
    :param lam_power: Dyadic scaling exercised by the covariance suites.
    :return: The verdict and the energy rows it was computed from.
    """
    rows = energy_report(trajectory)
    suites = energy_suites(rows)
    residuals = weak_form_residual(trajectory, default_test_functions(trajectory))
    suites.append(suite("weak_form", max(residuals), weak_form_threshold, f"{len(residuals)} test function(s)"))
    suites.extend(scaling_suites(scaling_check(trajectory, lam_power)))
    verdict = Verdict(suites=tuple(suites))
    for failed in (item for item in verdict.suites if not item.passed):
        logging.error(f"[DIAGNOSTICS] Suite {failed.name} failed: {failed.value:.3e} > {failed.threshold:.3e}")
    return verdict, rows


def write_verdict(verdict: Verdict, directory: Path) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / VERDICT_FILENAME
    path.write_text(verdict.render(), encoding="utf-8")
    logging.info(f"[DIAGNOSTICS] Verdict {'PASS' if verdict.passed else 'FAIL'} written to {path}")
    return path
