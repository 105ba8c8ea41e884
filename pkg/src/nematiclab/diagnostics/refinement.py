"""
Time-step refinement: the same data solved at Δt, Δt/2, Δt/4, ... and the observed orders of the energy-law
residual, the weak-form residuals and the sphere drift.

The energy-law residual and the sphere drift vanish with Δt, so their order is log2 of the ratio of consecutive
values. Weak-form residuals keep a floor from the spatial discretization; their order is measured by
self-convergence, log2 of the ratio of consecutive differences.
"""

import logging
import math
import typing

import numpy as np

from nematiclab.config.settings.defaults import (
    ENERGY_LAW_ORDER,
    REFINEMENT_FLOOR,
    REFINEMENT_HALVINGS,
    SPHERE_DRIFT_ORDER,
    WEAK_FORM_ORDER,
)
from nematiclab.config.settings.run import SchemeSection
from nematiclab.diagnostics.energy import energy_report
from nematiclab.diagnostics.verdict import energy_law_residual
from nematiclab.domain.grid import PhysicalConstants
from nematiclab.domain.reports import RefinementLevel, SuiteResult
from nematiclab.solver.picard import picard_solve
from nematiclab.solver.state import Trajectory
from nematiclab.solver.weak_form import default_test_functions, weak_form_residual
from nematiclab.spectral.field import SpectralField


def refinement_level(trajectory: Trajectory) -> RefinementLevel:
    """Error measures of a converged trajectory; the sphere drift is counted from its initial value."""
    rows = energy_report(trajectory)
    drift = max(row.sphere_drift for row in rows) - rows[0].sphere_drift
    residuals = tuple(weak_form_residual(trajectory, default_test_functions(trajectory)))
    return RefinementLevel(
        step=float(trajectory.times[1] - trajectory.times[0]),
        energy_law=energy_law_residual(rows),
        weak_form=max(residuals),
        weak_form_residuals=residuals,
        sphere_drift=max(drift, 0.0),
    )


def halved(scheme: SchemeSection, times: int) -> SchemeSection:
    """The scheme with ``times`` halvings of its time step."""
    return SchemeSection.model_validate(scheme.model_dump() | {"dt": scheme.step / 2**times})


def refinement_study(
    a0: SpectralField,
    u0: SpectralField,
    d0: SpectralField,
    scheme: SchemeSection,
    constants: PhysicalConstants,
    halvings: int = REFINEMENT_HALVINGS,
) -> list[RefinementLevel]:
    """
    Solve the same data at ``halvings + 1`` time steps, each half the previous one.

    :param halvings: Number of halvings, at least two so that one self-convergence order exists.
    :return: The measures of every run, coarsest first.
    """
    if halvings < 2:  # noqa: PLR2004
        raise ValueError(f"A refinement study needs at least two halvings, got {halvings}")
    levels = []
    for times in range(halvings + 1):
        refined = halved(scheme, times)
        trajectory, reports = picard_solve(a0, u0, d0, refined, constants)
        if not reports[-1].converged:
            logging.warning(f"[REFINEMENT] Run at dt = {refined.step:.4e} stopped before convergence")
        level = refinement_level(trajectory)
        logging.info(
            f"[REFINEMENT] dt = {refined.step:.4e}: energy law {level.energy_law:.3e}, "
            f"weak form {level.weak_form:.3e}, sphere drift {level.sphere_drift:.3e}"
        )
        levels.append(level)
    return levels


def _order(coarse: float, fine: float, floor: float) -> float:
    if fine <= floor:
        return math.inf
    if coarse <= floor:
        return -math.inf
    return math.log2(coarse / fine)


def observed_orders(values: typing.Sequence[float], floor: float = REFINEMENT_FLOOR) -> list[float]:
    """
    log2 of the ratio of consecutive values. A finer value at the floor has no observable order and yields
    infinity; growth from the floor yields minus infinity.
    """
    return [_order(coarse, fine, floor) for coarse, fine in zip(values, values[1:], strict=False)]


def self_convergence_orders(
    vectors: typing.Sequence[typing.Sequence[float]], floor: float = REFINEMENT_FLOOR
) -> list[float]:
    """
    Orders from the largest componentwise differences of consecutive vectors, one per triple of runs.
    """
    differences = [
        float(np.max(np.abs(np.subtract(fine, coarse)), initial=0.0))
        for coarse, fine in zip(vectors, vectors[1:], strict=False)
    ]
    return observed_orders(differences, floor)


def graded_order(orders: typing.Sequence[float]) -> float:
    """Order of the finest pair still above the floor, infinity when every pair reached it."""
    observable = [order for order in orders if order != math.inf]
    return observable[-1] if observable else math.inf


def order_suite(name: str, orders: typing.Sequence[float], minimum: float, detail: str) -> SuiteResult:
    """A suite passing when the graded order reaches ``minimum``."""
    order = graded_order(orders)
    return SuiteResult(name=name, passed=order >= minimum, value=order, threshold=minimum, detail=detail)


def refinement_suites(levels: typing.Sequence[RefinementLevel]) -> list[SuiteResult]:
    """Observed-order suites of the energy law, the weak form and the sphere drift."""
    energy = [level.energy_law for level in levels]
    sphere = [level.sphere_drift for level in levels]
    weak_form_orders = self_convergence_orders([level.weak_form_residuals for level in levels])
    return [
        order_suite("order_energy_law", observed_orders(energy), ENERGY_LAW_ORDER, _values(energy)),
        order_suite("order_weak_form", weak_form_orders, WEAK_FORM_ORDER, "self-convergence of the residuals"),
        order_suite("order_sphere_drift", observed_orders(sphere), SPHERE_DRIFT_ORDER, _values(sphere)),
    ]


def _values(values: typing.Sequence[float]) -> str:
    return "values " + ", ".join(f"{value:.3e}" for value in values)
