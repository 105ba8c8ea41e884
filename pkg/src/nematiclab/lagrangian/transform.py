"""
Eulerian trajectories seen from the particles: pullbacks along the flow, the identities relating both frames and
residuals of the system written in Lagrangian coordinates.
"""

import dataclasses
import logging

import numpy as np

from nematiclab.domain.grid import Grid, PhysicalConstants
from nematiclab.duhamel.series import TimeSeriesField
from nematiclab.lagrangian import calculus
from nematiclab.lagrangian.flow import FlowMap
from nematiclab.solver.state import Trajectory
from nematiclab.spectral import kernels
from nematiclab.spectral.field import inverse_transform, lp_norm
from nematiclab.spectral.kernels import RealArray

RESIDUAL_CHUNK = 16

LAGRANGIAN_EQUATIONS = ("transport", "momentum", "director", "divergence", "gradient")


@dataclasses.dataclass(frozen=True, eq=False)
class LagrangianState:
    """
    Fields of a trajectory composed with its flow, every array shaped (K + 1, components, M, ..., M).

    :ivar b: a ∘ X.
    :ivar v: u ∘ X.
    :ivar omega: d ∘ X.
    :ivar P: Π ∘ X, with Π the mean-zero potential of the stored pressure gradient.
    :ivar h: ᵗA ∇_y ω, shape (K + 1, N, N, M, ..., M) with [i, j] standing for ∂_i d_j.
    :ivar h_pulled: (∇_x d) ∘ X in the layout of ``h``.
    :ivar A: Inverse Jacobians of the flow.
    """

    grid: Grid
    times: RealArray
    constants: PhysicalConstants
    b: RealArray
    v: RealArray
    omega: RealArray
    P: RealArray
    h: RealArray
    h_pulled: RealArray
    A: RealArray

    @property
    def levels(self) -> int:
        return int(self.times.size)

    @property
    def velocity(self) -> TimeSeriesField:
        return TimeSeriesField(grid=self.grid, times=self.times, values=self.v)

    @property
    def h_discrepancy(self) -> float:
        return float(np.max(np.abs(self.h - self.h_pulled)))


def _matrix(values: RealArray, dim: int) -> RealArray:
    return values.reshape(values.shape[0], dim, dim, *values.shape[-dim:])


def pressure_potential(trajectory: Trajectory) -> RealArray:
    grid = trajectory.grid
    return inverse_transform(kernels.inverse_gradient_hat(trajectory.grad_pi.fourier, grid), grid.dim)


def to_lagrangian(trajectory: Trajectory, flow: FlowMap) -> LagrangianState:
    """
    Pull a trajectory back along its flow.

    :param trajectory: Eulerian trajectory.
    :param flow: Flow map of its velocity on the same time grid.
    :return: The Lagrangian fields, the director gradient computed both ways.
    """
    flow.require_times(trajectory.times)
    grid, dim = trajectory.grid, trajectory.grid.dim
    omega = flow.pull_back(trajectory.d.values)
    gradient_d = trajectory.d.map_fourier(kernels.gradient_hat).values
    state = LagrangianState(
        grid=grid,
        times=trajectory.times,
        constants=trajectory.constants,
        b=flow.pull_back(trajectory.a.values),
        v=flow.pull_back(trajectory.u.values),
        omega=omega,
        P=flow.pull_back(pressure_potential(trajectory)),
        h=calculus.x_gradient(omega, flow.A, grid),
        h_pulled=_matrix(flow.pull_back(gradient_d), dim),
        A=flow.A,
    )
    logging.debug(f"[LAGRANGIAN] Pulled back {state.levels} level(s), director gradient gap {state.h_discrepancy:.3e}")
    return state


def lagrangian_identities(trajectory: Trajectory, flow: FlowMap, state: LagrangianState) -> dict[str, float]:
    """
    Worst pointwise gaps of the relations between both frames.

    :return: ``grad_u`` for (∇_x u) ∘ X against ᵗA∇_y v, ``grad_d`` for the director gradient, ``inverse`` for
        A D_yX − Id, ``volume`` for det D_yX − 1, ``inverse_map`` for X ∘ Y − id and ``transport`` for b(t) − b(0).
    """
    grid, dim = trajectory.grid, trajectory.grid.dim
    gradient_u = _matrix(flow.pull_back(trajectory.u.map_fourier(kernels.gradient_hat).values), dim)
    return {
        "grad_u": float(np.max(np.abs(gradient_u - calculus.x_gradient(state.v, state.A, grid)))),
        "grad_d": state.h_discrepancy,
        "inverse": flow.inverse_defect(),
        "volume": flow.volume_defect(),
        "inverse_map": flow.inverse_consistency(),
        "transport": float(np.max(np.abs(state.b - state.b[:1]))),
    }


def stress_pairing(left: RealArray, right: RealArray) -> RealArray:
    """(p ⊙ q)_ij = Σ_k p_ik q_jk, so h ⊙ h is the stress ∇d⊙∇d in Lagrangian variables."""
    return np.einsum("lik...,ljk...->lij...", left, right)  # type: ignore[no-any-return]


def _chunk_residuals(
    state: LagrangianState, rates: dict[str, RealArray], levels: slice
) -> dict[str, RealArray]:
    grid, constants = state.grid, state.constants
    A, b, v, omega, P, h = (getattr(state, name)[levels] for name in ("A", "b", "v", "omega", "P", "h"))
    nu, lam, gamma = constants.nu, constants.lambda_, constants.gamma

    velocity_gradient = calculus.x_gradient(v, A, grid)
    pressure_gradient = calculus.x_gradient(P, A, grid)[:, :, 0]
    viscous = calculus.x_divergence(velocity_gradient, A, grid)
    elastic = calculus.x_divergence(stress_pairing(h, h), A, grid)
    energy = calculus.frobenius(h, h, grid.dim)
    momentum = rates["v"][levels] + (1.0 + b) * (pressure_gradient - nu * viscous) + lam * elastic

    director = rates["omega"][levels] - gamma * (calculus.x_divergence(h, A, grid) + energy * omega)
    divergence = np.trace(velocity_gradient, axis1=1, axis2=2)[:, np.newaxis]

    diffusion = calculus.x_divergence(calculus.x_gradient(h, A, grid), A, grid)
    cubic = calculus.x_gradient(energy * omega, A, grid)
    gradient = rates["h"][levels] + calculus.matmul(velocity_gradient, h) - gamma * (diffusion + cubic)

    fields = {
        "transport": rates["b"][levels],
        "momentum": momentum,
        "director": director,
        "divergence": divergence,
        "gradient": gradient,
    }
    return {
        name: np.atleast_1d(lp_norm(calculus.flatten_components(value, grid.dim), grid, 2.0))
        for name, value in fields.items()
    }


def lagrangian_residual_profiles(state: LagrangianState) -> dict[str, RealArray]:
    """
    L² residual of every equation of the Lagrangian system at every time level:
    ∂_t b = 0, ∂_t v + (1 + b)(ᵗA∇_yP − ν div_x ᵗA∇_y v) = −λ div_x(h⊙h), ∂_t ω − γ(ᵗA:∇h + |h|²ω) = 0,
    div_x v = 0 and ∂_t h + (ᵗA∇_yv)h − γ(Δ_x h + ∇_x(|h|²ω)) = 0, with div_x M = ᵗA:∇_y M.
    Time derivatives are centered differences.

    :param state: Pulled-back trajectory.
    :return: Equation name mapped to its K + 1 residual norms.
    """
    rates = {name: calculus.time_derivative(getattr(state, name), state.times) for name in ("b", "v", "omega", "h")}
    chunks: dict[str, list[RealArray]] = {name: [] for name in LAGRANGIAN_EQUATIONS}
    for start in range(0, state.levels, RESIDUAL_CHUNK):
        for name, norms in _chunk_residuals(state, rates, slice(start, start + RESIDUAL_CHUNK)).items():
            chunks[name].append(norms)
    return {name: np.concatenate(parts) for name, parts in chunks.items()}


def lagrangian_residuals(state: LagrangianState) -> dict[str, float]:
    """Largest residual of every equation over the time levels."""
    profiles = lagrangian_residual_profiles(state)
    residuals = {name: float(np.max(profile)) for name, profile in profiles.items()}
    logging.info(f"[LAGRANGIAN] Residuals {residuals}")
    return residuals

