import dataclasses
import logging
import typing

import numpy as np
import numpy.typing as npt
import tenacity

from nematiclab.common.exceptions import InnerContractionError, InnerSweepDivergenceError
from nematiclab.config.settings.services import LabConfiguration

RealArray = npt.NDArray[np.float64]
SweepUpdate = typing.Callable[[RealArray], RealArray]


@dataclasses.dataclass(frozen=True)
class SweepOutcome:
    """
    Result of an inner fixed-point iteration.

    :ivar iterate: The converged values.
    :ivar sweeps: Number of sweeps performed.
    :ivar residual: Relative sup-norm change of the last sweep.
    """

    iterate: RealArray
    sweeps: int
    residual: float


@dataclasses.dataclass
class _SweepRun:
    iterate: RealArray
    label: str
    window: int
    sweeps: int = 0
    residual: float = np.inf
    growing: int = 0

    def record(self, residual: float) -> None:
        self.growing = self.growing + 1 if residual > self.residual else 0
        self.residual = residual
        self.sweeps += 1
        if self.growing >= self.window:
            raise InnerSweepDivergenceError(
                f"[{self.label}] Inner residual grew over {self.growing} consecutive sweeps, now {residual:.3e}"
            )


@dataclasses.dataclass
class FixedPointSweeper:
    """
    Service running the inner fixed-point sweeps of the solver steps.
    Each sweep is one tenacity attempt; attempts repeat until the relative change drops below the tolerance.
    """

    tolerance: float = dataclasses.field(init=False, default=0.0)
    max_sweeps: int = dataclasses.field(init=False, default=1)
    divergence_window: int = dataclasses.field(init=False, default=1)

    def __post_init__(self) -> None:
        with LabConfiguration.use() as initialized_config:
            self.initialize(initialized_config)

    def initialize(self, config: LabConfiguration) -> None:
        self.tolerance = config.inner_tolerance
        self.max_sweeps = config.inner_max_sweeps
        self.divergence_window = config.divergence_window
        logging.debug(
            f"[SOLVER] Inner sweeps: tolerance {self.tolerance:.1e}, at most {self.max_sweeps} sweep(s), "
            f"divergence after {self.divergence_window} growing sweep(s)."
        )

    def solve(self, update: SweepUpdate, initial: RealArray, label: str) -> SweepOutcome:
        """
        Iterate ``values ← update(values)`` from ``initial``.

        :param update: The fixed-point map on real value arrays.
        :param initial: Starting values.
        :param label: Name of the step, used in log lines and errors.
        :return: The converged iterate.
        """
        run = _SweepRun(iterate=np.asarray(initial, dtype=np.float64), label=label, window=self.divergence_window)

        def sweep() -> float:
            candidate = update(run.iterate)
            change = float(np.max(np.abs(candidate - run.iterate))) if candidate.size else 0.0
            scale = max(1.0, float(np.max(np.abs(candidate))) if candidate.size else 0.0)
            run.iterate = candidate
            run.record(change / scale)
            logging.debug(f"[SOLVER] {label} sweep {run.sweeps}: relative change {run.residual:.3e}")
            return run.residual

        def give_up(retry_state: tenacity.RetryCallState) -> typing.NoReturn:
            raise InnerContractionError(
                f"[{label}] Inner sweeps still change by {run.residual:.3e} after {run.sweeps} sweep(s); "
                "the data are probably too large for the contraction"
            )

        retrying = tenacity.Retrying(
            stop=tenacity.stop_after_attempt(self.max_sweeps),
            retry=tenacity.retry_if_result(lambda residual: residual > self.tolerance),
            retry_error_callback=give_up,
        )
        retrying(sweep)
        return SweepOutcome(iterate=run.iterate, sweeps=run.sweeps, residual=run.residual)
