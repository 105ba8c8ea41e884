"""
Weak-form residuals of a trajectory against smooth, compactly supported test functions.
"""

import math
import typing
from enum import StrEnum

import numpy as np
from pydantic import Field, model_validator

from nematiclab.config.settings.services import LabConfiguration
from nematiclab.domain.base import FrozenModel
from nematiclab.domain.grid import Grid
from nematiclab.solver.nonlinear import convective, director_stress, gradient_energy
from nematiclab.solver.state import Trajectory
from nematiclab.spectral import kernels
from nematiclab.spectral.field import inverse_transform
from nematiclab.spectral.kernels import RealArray

WEAK_FORM_CHUNK = 32


class WeakEquation(StrEnum):
    TRANSPORT = "transport"
    DIVERGENCE = "divergence"
    MOMENTUM = "momentum"
    DIRECTOR = "director"


class TestFunction(FrozenModel):
    """
    φ(t, x) = η(t) cos(2π k·x/L + phase), with η = sin⁴ of the window phase inside ``window`` and zero outside.
    Vector equations test component ``component`` only.

    :ivar equation: Identity the function is tested against.
    :ivar mode: Integer wave vector k.
    :ivar component: Tested component of vector equations.
    :ivar phase: Spatial phase.
    :ivar window: Temporal support (t_start, t_end).
    """

    __test__ = False

    equation: WeakEquation
    mode: tuple[int, ...]
    component: int = Field(default=0, ge=0)
    phase: float = 0.0
    window: tuple[float, float]

    @model_validator(mode="after")
    def require_window(self) -> typing.Self:
        start, end = self.window
        if not 0.0 <= start < end:
            raise ValueError(f"Test window {self.window} must satisfy 0 <= start < end")
        return self

    def temporal(self, times: RealArray) -> tuple[RealArray, RealArray]:
        """η and ∂_tη at ``times``."""
        start, end = self.window
        span = end - start
        inside = (times > start) & (times < end)
        angle = math.pi * (times - start) / span
        sine, cosine = np.sin(angle), np.cos(angle)
        bump = np.where(inside, sine**4, 0.0)
        rate = np.where(inside, 4.0 * sine**3 * cosine * math.pi / span, 0.0)
        return bump, rate

    def spatial(self, grid: Grid) -> tuple[RealArray, RealArray]:
        """ψ of shape (M, ..., M) and ∇ψ of shape (N, M, ..., M)."""
        vector = np.asarray(self.mode, dtype=np.float64) * grid.fundamental_frequency
        if vector.size != grid.dim:
            raise ValueError(f"Test mode {self.mode} does not match dimension {grid.dim}")
        coordinates = grid.coordinates()
        argument = np.tensordot(vector, coordinates, axes=1) + self.phase
        pattern = np.cos(argument)
        slope = -vector[(...,) + (np.newaxis,) * grid.dim] * np.sin(argument)
        return pattern, slope


def default_test_functions(trajectory: Trajectory) -> list[TestFunction]:
    """A small family covering every identity, supported in the middle of the time interval."""
    dim, horizon = trajectory.grid.dim, trajectory.horizon
    window = (0.1 * horizon, 0.9 * horizon)
    modes = [tuple(int(i == axis) for i in range(dim)) for axis in range(dim)]
    modes.append(tuple([1, 1] + [0] * (dim - 2)))
    functions = []
    for equation in WeakEquation:
        for index, mode in enumerate(modes):
            functions.append(
                TestFunction(
                    equation=equation,
                    mode=mode,
                    component=index % dim,
                    phase=0.3 * (index + 1),
                    window=window,
                )
            )
    return functions


def trapezoid_weights(times: RealArray) -> RealArray:
    weights = np.zeros_like(times)
    steps = np.diff(times)
    weights[:-1] += 0.5 * steps
    weights[1:] += 0.5 * steps
    return weights


def _integrand_fields(trajectory: Trajectory, levels: slice) -> dict[str, RealArray]:
    grid, dim, constants = trajectory.grid, trajectory.grid.dim, trajectory.constants
    u_hat = trajectory.u.fourier[levels]
    d_hat = trajectory.d.fourier[levels]
    a = trajectory.a.values[levels]
    u = trajectory.u.values[levels]
    d = trajectory.d.values[levels]
    grad_u = inverse_transform(kernels.gradient_hat(u_hat, grid), dim)
    grad_d = inverse_transform(kernels.gradient_hat(d_hat, grid), dim)
    laplacian_u = inverse_transform(kernels.laplacian_hat(u_hat, grid), dim)
    laplacian_d = inverse_transform(kernels.laplacian_hat(d_hat, grid), dim)
    return {
        "a": a,
        "u": u,
        "d": d,
        "a_u": a * u,
        "u_grad_u": convective(u, grad_u, dim),
        "density_pressure": (1.0 + a) * (trajectory.grad_pi.values[levels] - constants.nu * laplacian_u),
        "stress": director_stress(grad_d, dim),
        "u_grad_d": convective(u, grad_d, dim),
        "laplacian_d": laplacian_d,
        "cubic_d": gradient_energy(grad_d, dim) * d,
    }


def _project(field: RealArray, pattern: RealArray, grid: Grid) -> RealArray:
    """Spatial integrals ∫ field·pattern of every level and component, shape (B, c)."""
    return np.tensordot(field, pattern, axes=grid.dim) * grid.cell_volume  # type: ignore[no-any-return]


def _terms(
    test: TestFunction,
    fields: dict[str, RealArray],
    grid: Grid,
    bump: RealArray,
    rate: RealArray,
    trajectory: Trajectory,
) -> RealArray:
    pattern, slope = test.spatial(grid)
    dim, c = grid.dim, test.component
    constants = trajectory.constants
    match test.equation:
        case WeakEquation.TRANSPORT:
            flux = sum(_project(fields["a_u"][:, i], slope[i], grid) for i in range(dim))
            return np.array([rate @ _project(fields["a"], pattern, grid)[:, 0], bump @ flux])
        case WeakEquation.DIVERGENCE:
            flux = sum(_project(fields["u"][:, i], slope[i], grid) for i in range(dim))
            return np.array([bump @ flux])
        case WeakEquation.MOMENTUM:
            stress = fields["stress"].reshape(fields["stress"].shape[0], dim, dim, *grid.shape)
            elastic = sum(_project(stress[:, i, c], slope[i], grid) for i in range(dim))
            return np.array(
                [
                    -rate @ _project(fields["u"], pattern, grid)[:, c],
                    bump @ _project(fields["u_grad_u"], pattern, grid)[:, c],
                    bump @ _project(fields["density_pressure"], pattern, grid)[:, c],
                    -constants.lambda_ * (bump @ elastic),
                ]
            )
        case WeakEquation.DIRECTOR:
            return np.array(
                [
                    -rate @ _project(fields["d"], pattern, grid)[:, c],
                    bump @ _project(fields["u_grad_d"], pattern, grid)[:, c],
                    -constants.gamma * (bump @ _project(fields["laplacian_d"], pattern, grid)[:, c]),
                    -constants.gamma * (bump @ _project(fields["cubic_d"], pattern, grid)[:, c]),
                ]
            )


def weak_form_terms(trajectory: Trajectory, test_functions: typing.Sequence[TestFunction]) -> list[RealArray]:
    """
    Space-time integrals of the individual terms of every tested identity.

    :return: One array of term values per test function; each identity states that their sum vanishes.
    """
    grid = trajectory.grid
    weights = trapezoid_weights(trajectory.times)
    temporal = [test.temporal(trajectory.times) for test in test_functions]
    totals: list[RealArray] = [np.zeros(0) for _ in test_functions]
    for start in range(0, trajectory.levels, WEAK_FORM_CHUNK):
        levels = slice(start, start + WEAK_FORM_CHUNK)
        fields = _integrand_fields(trajectory, levels)
        for index, test in enumerate(test_functions):
            bump, rate = temporal[index]
            terms = _terms(test, fields, grid, (weights * bump)[levels], (weights * rate)[levels], trajectory)
            totals[index] = terms if totals[index].size == 0 else totals[index] + terms
    return totals


def weak_form_residual(trajectory: Trajectory, test_functions: typing.Sequence[TestFunction]) -> list[float]:
    """
    Normalized residual of every tested identity: |Σ terms| / Σ |terms|.
    Identities whose terms all stay below the residual floor, scaled by the space-time volume, count as zero.

    :param trajectory: Trajectory to test.
    :param test_functions: Test functions with temporal support inside the time interval.
    :return: One residual per test function.
    """
    with LabConfiguration.use() as config:
        floor = config.residual_floor * trajectory.grid.volume * max(trajectory.horizon, 1.0)
    residuals = []
    for terms in weak_form_terms(trajectory, test_functions):
        scale = float(np.sum(np.abs(terms)))
        residuals.append(abs(float(np.sum(terms))) / scale if scale > floor else 0.0)
    return residuals
