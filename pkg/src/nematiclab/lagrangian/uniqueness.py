"""
Difference of two solutions in Lagrangian coordinates: the identity for δA, the source terms of the difference
system and the Stokes problem with prescribed divergence that the difference solves.
"""

import dataclasses
import logging

import numpy as np
from pydantic import Field

from nematiclab.common.exceptions import CompatibilityError, ComponentCountError, NeumannRadiusError
from nematiclab.config.settings.services import LabConfiguration
from nematiclab.domain.base import FrozenModel
from nematiclab.duhamel.operators import op_C
from nematiclab.duhamel.series import TimeSeriesField
from nematiclab.lagrangian import calculus
from nematiclab.lagrangian.flow import integrated_velocity_gradient, inverse_jacobian
from nematiclab.lagrangian.transform import LagrangianState, stress_pairing
from nematiclab.spectral import kernels
from nematiclab.spectral.kernels import RealArray

COMPATIBILITY_TOLERANCE = 1e-10

SOURCE_NAMES = ("f1", "f2", "f3", "f4", "f5", "f6", "f7", "f8", "g", "R")


class DeltaAReport(FrozenModel):
    """
    Comparison of the double-sum expression of δA = A1 − A2 with the difference of both Neumann series.

    :ivar discrepancy: Largest pointwise gap between both sides.
    :ivar delta_A_max: Largest entry of the directly computed δA.
    :ivar terms: Highest power kept in the double sum.
    """

    discrepancy: float = Field(ge=0.0)
    delta_A_max: float = Field(ge=0.0)
    terms: int = Field(ge=0)


def delta_A_identity(v1: TimeSeriesField, v2: TimeSeriesField) -> DeltaAReport:
    """
    Evaluate δA(t) = Σ_{k≥1} (−1)^k Σ_{0≤j<k} C1^j δC C2^{k−1−j} with C_i = ∫₀^t D_y v_i and δC = C1 − C2,
    and compare it with A1 − A2 from the Neumann series.

    :param v1: Lagrangian velocity of the first solution.
    :param v2: Lagrangian velocity of the second solution, aligned with ``v1``.
    :return: The discrepancy report.
    """
    v1.require_aligned(v2)
    first, second = integrated_velocity_gradient(v1), integrated_velocity_gradient(v2)
    for label, offset in (("first", first), ("second", second)):
        radius = float(np.max(calculus.row_sum_norm(offset)))
        if radius >= 1.0:
            raise NeumannRadiusError(f"The {label} flow has Neumann radius {radius:.4f}, not below one")
    direct = inverse_jacobian(first, require_series=True)[0] - inverse_jacobian(second, require_series=True)[0]

    with LabConfiguration.use() as config:
        tolerance, max_terms = config.neumann_tolerance, config.neumann_max_terms
    increment = first - second
    eye = calculus.identity(v1.grid, v1.levels)
    powers_first, powers_second = [eye], [eye]
    series = np.zeros_like(direct)
    terms = 0
    for k in range(1, max_terms + 1):
        inner = sum(
            calculus.matmul(calculus.matmul(powers_first[j], increment), powers_second[k - 1 - j]) for j in range(k)
        )
        series += (-1.0) ** k * inner
        terms = k
        powers_first.append(calculus.matmul(powers_first[-1], first))
        powers_second.append(calculus.matmul(powers_second[-1], second))
        if max(float(np.max(np.abs(powers_first[-1]))), float(np.max(np.abs(powers_second[-1])))) <= tolerance:
            break

    report = DeltaAReport(
        discrepancy=float(np.max(np.abs(series - direct))),
        delta_A_max=float(np.max(np.abs(direct))),
        terms=terms,
    )
    logging.info(f"[LAGRANGIAN] δA identity gap {report.discrepancy:.3e} with {terms} term(s)")
    return report


@dataclasses.dataclass(frozen=True, eq=False)
class _Variables:
    """Lagrangian variables of one solution, or their differences, with the y-derivatives the sources need."""

    A: RealArray
    v: RealArray
    omega: RealArray
    h: RealArray
    grad_v: RealArray
    grad_P: RealArray
    grad_h: RealArray

    @classmethod
    def of(cls, state: LagrangianState) -> "_Variables":
        grid = state.grid
        return cls(
            A=state.A,
            v=state.v,
            omega=state.omega,
            h=state.h,
            grad_v=calculus.y_gradient(state.v, grid),
            grad_P=calculus.y_gradient(state.P, grid)[:, :, 0],
            grad_h=calculus.y_gradient(state.h, grid),
        )

    def __sub__(self, other: "_Variables") -> "_Variables":
        return _Variables(
            **{field.name: getattr(self, field.name) - getattr(other, field.name) for field in dataclasses.fields(self)}
        )

    @property
    def tA(self) -> RealArray:
        return calculus.transpose(self.A)


def _transposed_gradient(matrix: RealArray, gradient: RealArray) -> RealArray:
    """(ᵗM ∇f)_i… = Σ_b M_bi ∂_b f…."""
    return np.einsum("lbi...,lb...->li...", matrix, gradient)  # type: ignore[no-any-return]


def _director_slope(h: RealArray, grad_h: RealArray) -> RealArray:
    """(h·∇q)_b = Σ_{k,l} h_kl ∂_b q_kl."""
    return np.einsum("lkm...,lbkm...->lb...", h, grad_h)  # type: ignore[no-any-return]


def _outer(vector: RealArray, other: RealArray) -> RealArray:
    return np.einsum("lb...,lj...->lbj...", vector, other)  # type: ignore[no-any-return]


def density_factor(state: LagrangianState) -> RealArray:
    """1 + b0, shared by both solutions since b does not move along particle paths."""
    return 1.0 + state.b[:1]


def solution_sources(state: LagrangianState, density: RealArray) -> dict[str, RealArray]:
    """
    Source terms of one solution whose differences between two solutions are the δ-sources.

    :param state: Lagrangian fields of the solution.
    :param density: Factor 1 + b0, shared by both solutions.
    :return: Name mapped to the field, one entry per name of :data:`SOURCE_NAMES`.
    """
    grid = state.grid
    s = _Variables.of(state)
    eye = calculus.identity(grid, state.levels)
    return {
        "f1": density * calculus.apply(eye - s.tA, s.grad_P),
        "f2": density * calculus.y_divergence(calculus.matmul(calculus.matmul(s.A, s.tA) - eye, s.grad_v), grid),
        "f3": calculus.y_divergence(calculus.matmul(s.A, stress_pairing(s.h, s.h)), grid),
        "f4": calculus.frobenius(s.h, s.h, grid.dim) * s.omega,
        "f5": calculus.contract(s.A, s.grad_h),
        "f6": -calculus.matmul(calculus.matmul(s.tA, s.grad_v), s.h),
        "f7": calculus.y_divergence(_transposed_gradient(s.A, s.grad_h) - s.grad_h, grid),
        "f8": 2.0 * _outer(_director_slope(s.h, s.grad_h), s.omega),
        "g": calculus.contract(eye - s.A, s.grad_v)[:, np.newaxis],
        "R": calculus.time_derivative(calculus.apply(eye - s.A, s.v), state.times),
    }


def delta_sources(first: LagrangianState, second: LagrangianState) -> dict[str, RealArray]:
    """
    Source terms δf1, ..., δf8, δg and δR of the system solved by the difference of two Lagrangian solutions,
    written with the first solution in the leading and the second in the trailing factors. Each equals the
    difference of the corresponding :func:`solution_sources` entries.

    :param first: Lagrangian fields of solution 1.
    :param second: Lagrangian fields of solution 2, on the same grid and times.
    :return: Name mapped to the field.
    """
    if first.v.shape != second.v.shape:
        raise ComponentCountError(f"Solutions of shapes {first.v.shape} and {second.v.shape} cannot be compared")
    grid = first.grid
    s1, s2 = _Variables.of(first), _Variables.of(second)
    d = s1 - s2
    eye = calculus.identity(grid, first.levels)
    density = density_factor(first)
    pairs = calculus.matmul(s2.A, s2.tA)
    return {
        "f1": density * (calculus.apply(eye - s2.tA, d.grad_P) - calculus.apply(d.tA, s1.grad_P)),
        "f2": density
        * calculus.y_divergence(
            calculus.matmul(pairs - eye, d.grad_v) + calculus.matmul(calculus.matmul(s1.A, s1.tA) - pairs, s1.grad_v),
            grid,
        ),
        "f3": calculus.y_divergence(
            calculus.matmul(d.A, stress_pairing(s2.h, s2.h))
            + calculus.matmul(s1.A, stress_pairing(d.h, s2.h))
            + calculus.matmul(s1.A, stress_pairing(s1.h, d.h)),
            grid,
        ),
        "f4": (calculus.frobenius(d.h, s2.h, grid.dim) + calculus.frobenius(s1.h, d.h, grid.dim)) * s2.omega
        + calculus.frobenius(s1.h, s1.h, grid.dim) * d.omega,
        "f5": calculus.contract(d.A, s2.grad_h) + calculus.contract(s1.A, d.grad_h),
        "f6": -(
            calculus.matmul(calculus.matmul(d.tA, s2.grad_v), s2.h)
            + calculus.matmul(calculus.matmul(s1.tA, d.grad_v), s2.h)
            + calculus.matmul(calculus.matmul(s1.tA, s1.grad_v), d.h)
        ),
        "f7": calculus.y_divergence(
            _transposed_gradient(s2.A, d.grad_h) - d.grad_h + _transposed_gradient(d.A, s1.grad_h), grid
        ),
        "f8": 2.0 * _outer(_director_slope(d.h, s2.grad_h) + _director_slope(s1.h, d.grad_h), s2.omega)
        + 2.0 * _outer(_director_slope(s1.h, s1.grad_h), d.omega),
        "g": (calculus.contract(eye - s2.A, d.grad_v) - calculus.contract(d.A, s1.grad_v))[:, np.newaxis],
        "R": calculus.time_derivative(calculus.apply(eye - s2.A, d.v) - calculus.apply(d.A, s1.v), first.times),
    }


def stokes_div_block_solve(
    f: TimeSeriesField, g: TimeSeriesField, R: TimeSeriesField
) -> tuple[TimeSeriesField, TimeSeriesField]:
    """
    Solve ∂_t v − Δv + ∇P = f, div v = g, ∂_t g = div R with v(0) = 0.
    The pressure gradient is the gradient part of f + ∇g − R and v = 𝓒(f − ∇P).

    :param f: Forcing, N components.
    :param g: Prescribed divergence, one component, vanishing at the first level.
    :param R: Flux with ∂_t g = div R, N components.
    :return: The velocity and the mean-zero pressure.
    """
    for series in (g, R):
        f.require_aligned(series)
    grid, dim = f.grid, f.grid.dim
    if f.components != dim or R.components != dim or g.components != 1:
        raise ComponentCountError("The Stokes block needs vector f and R and a scalar g")
    scale = max(1.0, float(np.max(np.abs(g.values))))
    if float(np.max(np.abs(g.values[0]))) > COMPATIBILITY_TOLERANCE * scale:
        raise CompatibilityError("The divergence must vanish at the first level since v starts from rest")

    forcing = f.fourier + kernels.gradient_hat(g.fourier, grid) - R.fourier
    pressure_gradient = TimeSeriesField.from_fourier(grid, f.times, kernels.gradient_part_hat(forcing, grid))
    pressure = TimeSeriesField.from_fourier(grid, f.times, kernels.inverse_gradient_hat(forcing, grid))
    velocity = op_C(f - pressure_gradient)
    logging.debug(f"[LAGRANGIAN] Stokes block solved over {f.levels} level(s)")
    return velocity, pressure
