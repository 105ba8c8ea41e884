"""
Itemized solution-space norms of trajectories and the increment monitor of the outer iteration.
"""

import dataclasses
import logging
import math
import typing

import numpy as np

from nematiclab.common.exceptions import ExponentRangeError
from nematiclab.domain.indices import WeightedExponentTable
from nematiclab.domain.reports import LedgerKind, NormLedger
from nematiclab.duhamel.series import weighted_time_lebesgue
from nematiclab.solver.state import Trajectory
from nematiclab.spectral import kernels
from nematiclab.spectral.field import inverse_transform, lp_norm
from nematiclab.spectral.kernels import ComplexArray, RealArray

LEDGER_VALUE_BUDGET = 2**24
DIRECTOR_SUP_LABEL = "d L^inf L^inf"
SUP_SQUARE_LABEL = "(u,grad_d) L^2 L^inf"

GRADIENTS = ("grad_u", "grad2_d")
FIRST_ORDER = ("u", "grad_d")
SECOND_ORDER = ("hess_u", "grad3_d", "grad_pi")
DERIVATIVE_PARENTS = {"grad_u": "u", "hess_u": "grad_u", "grad_d": "d", "grad2_d": "grad_d", "grad3_d": "grad2_d"}


@dataclasses.dataclass(frozen=True)
class LedgerTerm:
    """
    One component ‖t^w (f_1, ..., f_k)‖_{L^r_t L^p_x} of a ledger.

    :ivar label: Name of the component in reports.
    :ivar pieces: Names of the fields joined into one carrier.
    :ivar p: Spatial index.
    :ivar r: Time index.
    :ivar weight: Exponent w of the time weight.
    """

    label: str
    pieces: tuple[str, ...]
    p: float
    r: float
    weight: float = 0.0


def _fmt(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.4g}"


def _term(label: str, pieces: tuple[str, ...], p: float, r: float, weight: float = 0.0) -> LedgerTerm:
    prefix = f"t^{weight:.4g} " if weight else ""
    return LedgerTerm(f"{prefix}{label} L^{_fmt(r)} L^{_fmt(p)}", pieces, p, r, weight)


def x_terms(dim: int, r: float) -> tuple[LedgerTerm, ...]:
    """Components of the unweighted norm for 1 < r < 2."""
    if not 1.0 < r < 2.0:  # noqa: PLR2004
        raise ExponentRangeError(f"The unweighted ledger needs 1 < r < 2, got r = {r}")
    return (
        _term("grad_d", ("grad_d",), 3.0 * dim * r / (3.0 * r - 2.0), 3.0 * r),
        _term("grad_(u,grad_d)", GRADIENTS, dim * r / (2.0 * r - 1.0), 2.0 * r),
        _term("grad_(u,grad_d)", GRADIENTS, dim * r / (2.0 * (r - 1.0)), r),
        _term("(u,grad_d)", FIRST_ORDER, dim * r / (r - 1.0), 2.0 * r),
        _term("(hess_u,grad3_d,grad_pi)", SECOND_ORDER, dim * r / (3.0 * r - 2.0), r),
    )


def y_terms(table: WeightedExponentTable) -> tuple[LedgerTerm, ...]:
    """Components of the time-weighted norm described by ``table``."""
    r, p1, p2, p3 = table.r, table.p1, table.p2, table.p3
    return (
        _term("grad_(u,grad_d)", GRADIENTS, p2, 2.0 * r, table.beta1),
        _term("grad_(u,grad_d)", GRADIENTS, p2, math.inf, table.beta2),
        _term("grad_(u,grad_d)", GRADIENTS, p3 / 2.0, 2.0 * r, table.beta3),
        _term("grad_(u,grad_d)", GRADIENTS, p3 / 2.0, math.inf, table.beta4),
        _term("(u,grad_d)", FIRST_ORDER, p3, 2.0 * r, table.gamma1),
        _term("(u,grad_d)", FIRST_ORDER, p3, math.inf, table.gamma2),
        _term("grad_d", ("grad_d",), 3.0 * p1, 2.0 * r, table.gamma3),
        _term("grad_d", ("grad_d",), 3.0 * p1, math.inf, table.gamma4),
        _term("(hess_u,grad_pi)", ("hess_u", "grad_pi"), p1, 2.0 * r, table.alpha1),
        _term("(hess_u,grad3_d,grad_pi)", SECOND_ORDER, p1, r, table.alpha2),
    )


class _ChunkPieces:
    """Lazily differentiated fields of a trajectory on a slice of time levels."""

    def __init__(self, trajectory: Trajectory, levels: slice) -> None:
        self.trajectory = trajectory
        self.levels = levels
        self.cache: dict[str, RealArray] = {}
        self.spectral: dict[str, ComplexArray] = {}

    def _coefficients(self, name: str) -> ComplexArray:
        if name not in self.spectral:
            grid = self.trajectory.grid
            match name:
                case "u" | "d":
                    self.spectral[name] = getattr(self.trajectory, name).fourier[self.levels]
                case _:
                    self.spectral[name] = kernels.gradient_hat(self._coefficients(DERIVATIVE_PARENTS[name]), grid)
        return self.spectral[name]

    def __getitem__(self, name: str) -> RealArray:
        if name not in self.cache:
            if name in ("u", "d", "grad_pi"):
                self.cache[name] = getattr(self.trajectory, name).values[self.levels]
            else:
                self.cache[name] = inverse_transform(self._coefficients(name), self.trajectory.grid.dim)
        return self.cache[name]


def _chunk_size(trajectory: Trajectory) -> int:
    grid = trajectory.grid
    per_level = grid.dim**4 * grid.points_per_axis**grid.dim
    return max(1, LEDGER_VALUE_BUDGET // per_level)


def spatial_norm_profiles(trajectory: Trajectory, terms: typing.Iterable[LedgerTerm]) -> dict[LedgerTerm, RealArray]:
    """
    Spatial norms of every term's carrier at every time level, computed over chunks of time levels.

    :return: Each term mapped to its K + 1 spatial norms.
    """
    terms = tuple(terms)
    grid = trajectory.grid
    profiles: dict[LedgerTerm, list[RealArray]] = {term: [] for term in terms}
    size = _chunk_size(trajectory)
    for start in range(0, trajectory.levels, size):
        pieces = _ChunkPieces(trajectory, slice(start, start + size))
        for term in terms:
            carrier = np.concatenate([pieces[name] for name in term.pieces], axis=1)
            profiles[term].append(np.atleast_1d(lp_norm(carrier, grid, term.p)))
    return {term: np.concatenate(chunks) for term, chunks in profiles.items()}


def evaluate_terms(trajectory: Trajectory, terms: typing.Iterable[LedgerTerm]) -> dict[str, float]:
    profiles = spatial_norm_profiles(trajectory, terms)
    return {
        term.label: weighted_time_lebesgue(norms, trajectory.times, term.weight, term.r)
        for term, norms in profiles.items()
    }


def x_norm_ledger(trajectory: Trajectory, r: float) -> NormLedger:
    """
    Unweighted solution-space norm of a trajectory, one entry per component.

    :param trajectory: Trajectory or increment of two trajectories.
    :param r: Time index in (1, 2).
    :return: The ledger.
    """
    components = evaluate_terms(trajectory, x_terms(trajectory.grid.dim, r))
    logging.debug(f"[LEDGER] Unweighted ledger at r = {r}: {components}")
    return NormLedger(kind=LedgerKind.UNWEIGHTED, components=components)


def y_norm_ledger(trajectory: Trajectory, table: WeightedExponentTable, p: float = 1.0) -> NormLedger:
    """
    Time-weighted solution-space norm of a trajectory.

    :param trajectory: Trajectory or increment of two trajectories.
    :param table: Weight exponents; their index range is checked first.
    :param p: Data index entering the lower bound on p1.
    :return: The ledger.
    """
    table.check_existence_range(p)
    components = evaluate_terms(trajectory, y_terms(table))
    logging.debug(f"[LEDGER] Weighted ledger at r = {table.r}: {components}")
    return NormLedger(kind=LedgerKind.WEIGHTED, components=components)


def sup_square_norm(trajectory: Trajectory) -> float:
    """‖(u, ∇d)‖_{L²_t L^∞_x}."""
    return evaluate_terms(trajectory, (LedgerTerm(SUP_SQUARE_LABEL, FIRST_ORDER, math.inf, 2.0),))[SUP_SQUARE_LABEL]


def delta_U(increment: Trajectory, r: float, table: WeightedExponentTable | None = None) -> dict[str, float]:
    """
    Breakdown of the increment norm δU of two consecutive iterates.

    With ``table`` the weighted ledger replaces the unweighted one together with its L²L^∞ companion.

    :param increment: Difference of two iterates.
    :param r: Time index of the scheme.
    :param table: Weight exponents when r lies outside (1, 2).
    :return: Component label mapped to value; the increment norm is their sum.
    """
    director_sup = float(np.max(increment.d.spatial_norms(math.inf)))
    components = {DIRECTOR_SUP_LABEL: director_sup}
    if table is None:
        companion = LedgerTerm(SUP_SQUARE_LABEL, FIRST_ORDER, math.inf, 2.0)
        components |= evaluate_terms(increment, (*x_terms(increment.grid.dim, r), companion))
    else:
        components |= y_norm_ledger(increment, table).components
    return components
