"""
Covariance of trajectories under the dyadic scaling (a, u, d, ∇Π)(t, x) ↦ (a, λu, d, λ²∇Π)(λ²t, λx).
"""

import dataclasses
import logging

from pydantic import Field

from nematiclab.besov.norms import critical_scaling_ratio
from nematiclab.common.exceptions import ScalingError
from nematiclab.config.settings.defaults import DEFAULT_SCHEME_P, DEFAULT_SCHEME_R
from nematiclab.config.settings.services import LabConfiguration
from nematiclab.domain.base import FrozenModel
from nematiclab.duhamel.series import TimeSeriesField
from nematiclab.solver.state import Trajectory
from nematiclab.solver.weak_form import default_test_functions, weak_form_residual
from nematiclab.spectral.operators import gradient


class ScalingReport(FrozenModel):
    """
    Weak-form residuals of a trajectory and of its rescaled copy, with the scaling of the critical data norms.

    :ivar lam_power: λ = 2^lam_power.
    :ivar original: Largest weak-form residual of the trajectory.
    :ivar rescaled: Largest weak-form residual of the rescaled trajectory.
    :ivar ratio: (rescaled + floor) / (original + floor).
    :ivar critical_ratios: Critical Besov norm of the rescaled data over that of the data, per field.
    """

    lam_power: int
    original: float = Field(ge=0.0)
    rescaled: float = Field(ge=0.0)
    ratio: float = Field(ge=0.0)
    critical_ratios: dict[str, float] = Field(default_factory=dict)


def rescale_trajectory(trajectory: Trajectory, lam_power: int) -> Trajectory:
    """
    Rescaled trajectory on the box of length L/λ and the times t/λ², with λ = 2^lam_power.
    Grid values are kept, the velocity is multiplied by λ and the pressure gradient by λ².
    """
    if isinstance(lam_power, bool) or not isinstance(lam_power, int):
        raise ScalingError(f"Only dyadic scalings 2^k with integer k are exact on the grid, got {lam_power!r}")
    lam = 2.0**lam_power
    grid = trajectory.grid.shrunk(lam)
    times = trajectory.times / lam**2

    def rescaled(series: TimeSeriesField, factor: float) -> TimeSeriesField:
        return TimeSeriesField(grid=grid, times=times, values=series.values * factor)

    return dataclasses.replace(
        trajectory,
        a=rescaled(trajectory.a, 1.0),
        u=rescaled(trajectory.u, lam),
        d=rescaled(trajectory.d, 1.0),
        grad_pi=rescaled(trajectory.grad_pi, lam**2),
    )


def _largest_residual(trajectory: Trajectory) -> float:
    return max(weak_form_residual(trajectory, default_test_functions(trajectory)))


def scaling_check(
    trajectory: Trajectory, lam_power: int, p: float = DEFAULT_SCHEME_P, r: float = DEFAULT_SCHEME_R
) -> ScalingReport:
    """
    Compare weak-form residuals before and after rescaling, and the critical norms of the initial velocity and
    director gradient under the same scaling.

    :param trajectory: Trajectory to rescale.
    :param lam_power: Integer power of two.
    :param p: Spatial index of the critical norm.
    :param r: Summation index of the critical norm.
    :return: The report; a ratio near one means the residuals are scale invariant.
    """
    rescaled = rescale_trajectory(trajectory, lam_power)
    original_residual = _largest_residual(trajectory)
    rescaled_residual = _largest_residual(rescaled)
    with LabConfiguration.use() as config:
        floor = config.residual_floor
    initial = trajectory.snapshot(0)
    critical = {
        "u0": critical_scaling_ratio(initial.u.without_mean(), p, r, lam_power),
        "grad_d0": critical_scaling_ratio(gradient(initial.d), p, r, lam_power),
    }
    report = ScalingReport(
        lam_power=lam_power,
        original=original_residual,
        rescaled=rescaled_residual,
        ratio=(rescaled_residual + floor) / (original_residual + floor),
        critical_ratios=critical,
    )
    logging.info(
        f"[DIAGNOSTICS] Scaling by 2^{lam_power}: residual {original_residual:.3e} -> {rescaled_residual:.3e}"
    )
    return report
