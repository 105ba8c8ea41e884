"""
Flow maps of a velocity trajectory and the inverse of their Jacobian.
"""

import dataclasses
import logging
import typing

import numpy as np
import scipy.integrate

from nematiclab.common.exceptions import ComponentCountError, NeumannRadiusError, TimeGridMismatchError
from nematiclab.config.settings.services import LabConfiguration
from nematiclab.domain.grid import Grid
from nematiclab.domain.reports import InverseSource, NeumannCertificate
from nematiclab.duhamel.series import TimeSeriesField
from nematiclab.lagrangian import calculus
from nematiclab.solver.state import Trajectory
from nematiclab.solver.transport import require_cfl
from nematiclab.spectral.interpolation import PeriodicInterpolator
from nematiclab.spectral.kernels import RealArray


@dataclasses.dataclass(frozen=True, eq=False)
class FlowMap:
    """
    Particle paths X(t, y) of a velocity field together with their inverse maps Y(t, x) and A = (D_yX)^{-1}.

    :ivar grid: Spatial grid of the labels y and positions x.
    :ivar times: Time levels.
    :ivar X: Displacements X(t_k, y) − y, shape (K + 1, N, M, ..., M).
    :ivar Y: Inverse displacements Y(t_k, x) − x, same shape.
    :ivar A: Inverse Jacobians, shape (K + 1, N, N, M, ..., M).
    :ivar lipschitz_budget: ∫₀^{t_k} ‖D_y v(s)‖_∞ ds at every level.
    :ivar certificates: How A was obtained at every level.
    """

    grid: Grid
    times: RealArray
    X: RealArray
    Y: RealArray
    A: RealArray
    lipschitz_budget: RealArray
    certificates: tuple[NeumannCertificate, ...]

    @property
    def levels(self) -> int:
        return int(self.times.size)

    @property
    def neumann_available(self) -> bool:
        return bool(self.lipschitz_budget[-1] < 1.0)

    @property
    def jacobian(self) -> RealArray:
        """D_yX = Id + D_y(X − y)."""
        return calculus.identity(self.grid, self.levels) + jacobian_offset(self.X, self.grid)

    def require_times(self, times: RealArray) -> None:
        if times.shape != self.times.shape or not np.allclose(times, self.times, rtol=1e-12, atol=1e-15):
            raise TimeGridMismatchError("Fields and flow map live on different time grids")

    def pull_back(self, values: RealArray) -> RealArray:
        """
        Compose fields with the flow, f(t_k, X(t_k, y)).

        :param values: Eulerian values of shape (K + 1, c, M, ..., M).
        :return: Lagrangian values of the same shape.
        """
        labels = self.grid.coordinates()
        return np.stack(
            [
                PeriodicInterpolator.from_values(level, self.grid)(labels + displacement)
                for level, displacement in zip(values, self.X, strict=True)
            ]
        )

    def inverse_defect(self) -> float:
        """max |A D_yX − Id| over every level and point."""
        eye = calculus.identity(self.grid, self.levels)
        return float(np.max(np.abs(calculus.matmul(self.A, self.jacobian) - eye)))

    def volume_defect(self) -> float:
        """max |det D_yX − 1|, which vanishes for divergence-free flows."""
        return float(np.max(np.abs(calculus.determinant(self.jacobian) - 1.0)))

    def inverse_consistency(self) -> float:
        """max |X(t, Y(t, x)) − x| over every level and point."""
        positions = self.grid.coordinates()
        worst = 0.0
        for forward, backward in zip(self.X, self.Y, strict=True):
            landed = backward + PeriodicInterpolator.from_values(forward, self.grid)(positions + backward)
            worst = max(worst, float(np.max(np.abs(landed))))
        return worst


def jacobian_offset(displacements: RealArray, grid: Grid) -> RealArray:
    """D_y of periodic displacements, [a, b] = ∂_b ξ_a."""
    return calculus.transpose(calculus.y_gradient(displacements, grid))


def _characteristic_increment(
    first: PeriodicInterpolator,
    middle: PeriodicInterpolator,
    last: PeriodicInterpolator,
    positions: RealArray,
    step: float,
    direction: float,
) -> RealArray:
    """Four-stage increment of dx/ds = direction · u over one step, velocities given at its start, middle, end."""
    signed = direction * step
    k1 = first(positions)
    k2 = middle(positions + 0.5 * signed * k1)
    k3 = middle(positions + 0.5 * signed * k2)
    k4 = last(positions + signed * k3)
    return typing.cast(RealArray, signed / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))


def _interpolators(u: TimeSeriesField, k: int) -> tuple[PeriodicInterpolator, ...]:
    start, end = u.values[k], u.values[k + 1]
    return tuple(PeriodicInterpolator.from_values(level, u.grid) for level in (start, 0.5 * (start + end), end))


def characteristics(u: TimeSeriesField) -> tuple[RealArray, RealArray]:
    """
    Forward displacements X − y and inverse displacements Y − x on the time grid of ``u``.
    The inverse maps compose one-step backward maps, Y_{k+1} − x = β(x) + (Y_k − x)(x + β(x)).

    :param u: Velocity with N components, linear in time between levels.
    :return: Both displacement arrays of shape (K + 1, N, M, ..., M).
    """
    if u.components != u.grid.dim:
        raise ComponentCountError(f"Flow maps need an {u.grid.dim}-component velocity, got {u.components}")
    grid = u.grid
    positions = grid.coordinates()
    forward = np.zeros_like(u.values)
    backward = np.zeros_like(u.values)
    for k in range(u.levels - 1):
        step = float(u.times[k + 1] - u.times[k])
        first, middle, last = _interpolators(u, k)
        increment = _characteristic_increment(first, middle, last, positions + forward[k], step, 1.0)
        require_cfl(increment, grid, step)
        forward[k + 1] = forward[k] + increment
        retreat = _characteristic_increment(last, middle, first, positions, step, -1.0)
        previous = PeriodicInterpolator.from_values(backward[k], grid)
        backward[k + 1] = retreat + previous(positions + retreat)
    return forward, backward


def _neumann_series(offset: RealArray, tolerance: float, max_terms: int) -> tuple[RealArray, int]:
    """Σ_k (−C)^k of a single level (1, N, N, *spatial) until the next power is below ``tolerance``."""
    dim = offset.shape[1]
    grid_shape = offset.shape[3:]
    total = np.broadcast_to(np.eye(dim).reshape(1, dim, dim, *(1,) * len(grid_shape)), offset.shape).copy()
    term = total.copy()
    terms = 0
    while terms < max_terms:
        term = -calculus.matmul(term, offset)
        if float(np.max(np.abs(term))) <= tolerance:
            break
        total += term
        terms += 1
    return total, terms


def inverse_jacobian(
    offset: RealArray, require_series: bool = False
) -> tuple[RealArray, tuple[NeumannCertificate, ...]]:
    """
    A = (Id + C)^{-1} at every level, by the Neumann series Σ_k (−C)^k while the radius proxy ρ = max ‖C‖_∞ stays
    below one and by pointwise direct inversion otherwise.

    :param offset: C = D_yX − Id of shape (L, N, N, *spatial).
    :param require_series: Raise :class:`NeumannRadiusError` instead of falling back when ρ ≥ 1.
    :return: A of the same shape and one certificate per level.
    """
    with LabConfiguration.use() as config:
        tolerance, max_terms = config.neumann_tolerance, config.neumann_max_terms
    dim = offset.shape[1]
    radii = calculus.row_sum_norm(offset)
    inverses = np.empty_like(offset)
    certificates = []
    for k, radius in enumerate(radii):
        level = offset[k : k + 1]
        if radius < 1.0:
            series, terms = _neumann_series(level, tolerance, max_terms)
            inverses[k] = series[0]
            tail = float(radius ** (terms + 1) / (1.0 - radius))
            certificates.append(
                NeumannCertificate(terms=terms, radius=float(radius), tail_bound=tail, source=InverseSource.SERIES)
            )
            continue
        if require_series:
            raise NeumannRadiusError(f"Neumann radius ρ = {radius:.4f} at level {k} is not below one")
        logging.warning(f"[LAGRANGIAN] Neumann radius ρ = {radius:.4f} at level {k}, inverting directly")
        eye = np.eye(dim).reshape(1, dim, dim, *(1,) * (offset.ndim - 3))
        inverses[k] = calculus.inverse(eye + level)[0]
        certificates.append(
            NeumannCertificate(terms=0, radius=float(radius), tail_bound=float("inf"), source=InverseSource.DIRECT)
        )
    return inverses, tuple(certificates)


def integrated_velocity_gradient(v: TimeSeriesField) -> RealArray:
    """C(t) = ∫₀^t D_y v(s) ds by the trapezoid rule, shape (K + 1, N, N, *spatial)."""
    gradient = calculus.transpose(calculus.y_gradient(v.values, v.grid))
    return scipy.integrate.cumulative_trapezoid(gradient, v.times, axis=0, initial=0.0)  # type: ignore[no-any-return]


def neumann_A(v: TimeSeriesField, require_series: bool = False) -> tuple[RealArray, tuple[NeumannCertificate, ...]]:
    """
    Inverse Jacobian from a Lagrangian velocity, A(t) = Σ_k (−1)^k (∫₀^t D_y v ds)^k.

    :param v: Lagrangian velocity v(t, y) = u(t, X(t, y)).
    :param require_series: Refuse the direct fallback.
    :return: A at every level and the certificates.
    """
    if v.components != v.grid.dim:
        raise ComponentCountError(f"Lagrangian velocity needs {v.grid.dim} components, got {v.components}")
    return inverse_jacobian(integrated_velocity_gradient(v), require_series)


def lipschitz_budget(v: RealArray, grid: Grid, times: RealArray) -> RealArray:
    """Running ∫₀^t ‖D_y v(s)‖_∞ ds with the pointwise matrix ∞-norm."""
    sup = calculus.row_sum_norm(calculus.transpose(calculus.y_gradient(v, grid)))
    return scipy.integrate.cumulative_trapezoid(sup, times, initial=0.0)  # type: ignore[no-any-return]


def flow_map(trajectory: Trajectory, require_series: bool = False) -> FlowMap:
    """
    Flow of the velocity of a trajectory with its inverse maps and inverse Jacobians.

    :param trajectory: Eulerian trajectory; only its velocity is used.
    :param require_series: Raise when the Neumann series is unavailable at some level.
    :return: The flow map.
    """
    u = trajectory.u
    forward, backward = characteristics(u)
    grid = u.grid
    labels = grid.coordinates()
    lagrangian_velocity = np.stack(
        [
            PeriodicInterpolator.from_values(level, grid)(labels + displacement)
            for level, displacement in zip(u.values, forward, strict=True)
        ]
    )
    budget = lipschitz_budget(lagrangian_velocity, grid, u.times)
    A, certificates = inverse_jacobian(jacobian_offset(forward, grid), require_series)
    if budget[-1] >= 1.0:
        logging.warning(f"[LAGRANGIAN] Lipschitz budget {budget[-1]:.4f} is not below one at T = {u.horizon}")
    direct = sum(certificate.source is InverseSource.DIRECT for certificate in certificates)
    logging.info(
        f"[LAGRANGIAN] Flow map over {u.levels} level(s), budget {budget[-1]:.3e}, {direct} direct inversion(s)"
    )
    return FlowMap(
        grid=grid,
        times=u.times,
        X=forward,
        Y=backward,
        A=A,
        lipschitz_budget=budget,
        certificates=certificates,
    )
