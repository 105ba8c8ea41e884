"""
CSV and JSON artefacts written under the ``--out`` directory.
"""

import csv
import json
import logging
import typing
from pathlib import Path

from nematiclab.config.settings.defaults import RESOLVED_CONFIG_FILENAME
from nematiclab.config.settings.run import RunConfiguration, resolved_configuration
from nematiclab.diagnostics.refinement import observed_orders, self_convergence_orders
from nematiclab.domain.reports import DiagnosticsRow, IterationReport, NormLedger, RefinementLevel
from nematiclab.duhamel.lemmas import LemmaVerdict
from nematiclab.spectral.kernels import RealArray

ITERATIONS_FILENAME = "iterations.csv"
LEDGER_FILENAME = "ledger.csv"
DIAGNOSTICS_FILENAME = "diagnostics.csv"
REFINEMENT_FILENAME = "refinement.csv"
TRAJECTORY_DIRECTORY = "trajectory"

Row = typing.Mapping[str, typing.Any]


def write_rows(path: Path, rows: typing.Sequence[Row], fieldnames: typing.Sequence[str] | None = None) -> Path:
    """
    Write dictionaries as a CSV file with a header line.

    :param path: Target file; missing parent directories are created.
    :param rows: The rows.
    :param fieldnames: Column order, by default the keys of all rows in order of appearance.
    :return: The path written.
    """
    if fieldnames is None:
        fieldnames = list(dict.fromkeys(key for row in rows for key in row))
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=fieldnames, restval="")
        writer.writeheader()
        writer.writerows(rows)
    logging.info(f"[CLI] Wrote {len(rows)} row(s) to {path}")
    return path


def write_iterations(reports: typing.Sequence[IterationReport], directory: Path) -> Path:
    rows = [
        {
            "n": report.n,
            "delta_U": report.delta_U,
            "converged": report.converged,
            **report.components,
            **report.monitors,
        }
        for report in reports
    ]
    return write_rows(directory / ITERATIONS_FILENAME, rows)


def write_ledger(ledger: NormLedger, directory: Path) -> Path:
    kind = ledger.kind.value
    rows = [{"kind": kind, "component": label, "value": value} for label, value in ledger.components.items()]
    rows.append({"kind": kind, "component": "total", "value": ledger.total})
    return write_rows(directory / LEDGER_FILENAME, rows)


def write_diagnostics(rows: typing.Sequence[DiagnosticsRow], directory: Path) -> Path:
    return write_rows(
        directory / DIAGNOSTICS_FILENAME,
        [row.model_dump() for row in rows],
        fieldnames=list(DiagnosticsRow.model_fields),
    )


def write_refinement(levels: typing.Sequence[RefinementLevel], directory: Path) -> Path:
    """One row per time step with the observed orders against the coarser runs before it."""
    energy = observed_orders([level.energy_law for level in levels])
    sphere = observed_orders([level.sphere_drift for level in levels])
    weak_form = self_convergence_orders([level.weak_form_residuals for level in levels])
    rows: list[dict[str, typing.Any]] = []
    for index, level in enumerate(levels):
        row: dict[str, typing.Any] = level.model_dump(exclude={"weak_form_residuals"})
        if index > 0:
            row["order_energy_law"] = energy[index - 1]
            row["order_sphere_drift"] = sphere[index - 1]
        if index > 1:
            row["order_weak_form"] = weak_form[index - 2]
        rows.append(row)
    return write_rows(directory / REFINEMENT_FILENAME, rows)


def write_named_values(path: Path, values: typing.Mapping[str, float]) -> Path:
    return write_rows(path, [{"name": name, "value": value} for name, value in values.items()])


def write_profiles(path: Path, times: RealArray, profiles: typing.Mapping[str, RealArray]) -> Path:
    """One row per time level, one column per profile."""
    rows = [
        {"time": float(time), **{name: float(profile[k]) for name, profile in profiles.items()}}
        for k, time in enumerate(times)
    ]
    return write_rows(path, rows)


def write_lemma(verdict: LemmaVerdict, directory: Path) -> Path:
    rows = [
        {
            "lemma": verdict.lemma,
            "pair": row.pair,
            "trial": row.trial,
            "base_ratio": row.base_ratio,
            "refined_ratio": row.refined_ratio,
        }
        for row in verdict.rows
    ]
    return write_rows(directory / f"duhamel_{verdict.lemma.replace('.', '_')}.csv", rows)


def write_resolved_configuration(configuration: RunConfiguration, directory: Path) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / RESOLVED_CONFIG_FILENAME
    path.write_text(json.dumps(resolved_configuration(configuration), indent=2, default=str), encoding="utf-8")
    logging.info(f"[CLI] Archived the resolved configuration in {path}")
    return path
