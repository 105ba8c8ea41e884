import contextlib
import os
from collections.abc import Generator

import environ

from nematiclab.config.settings.defaults import (
    DEFAULT_LOG_LEVEL,
    DEFAULT_THREADS,
    DIVERGENCE_WINDOW,
    INNER_MAX_SWEEPS,
    INNER_TOLERANCE,
    LAB_CONFIGURATION_PREFIX,
    MEAN_ZERO_TOLERANCE,
    NEUMANN_MAX_TERMS,
    NEUMANN_TOLERANCE,
    RESIDUAL_FLOOR,
    RESOLUTION_DRIFT,
    SPHERE_TOLERANCE,
)


@environ.config(prefix=LAB_CONFIGURATION_PREFIX)
class LabConfiguration:
    """
    Runtime configuration of the laboratory, read from EL_* environment variables.
    """

    @classmethod
    @contextlib.contextmanager
    def use(cls) -> Generator["LabConfiguration"]:
        """Context manager to use the configuration."""
        yield cls.from_environ(environ=os.environ)  # type: ignore

    threads: int = environ.var(
        default=DEFAULT_THREADS,
        help="Worker count for the FFT backend. Zero or negative uses every core.",
        converter=int,
    )
    log_level: str = environ.var(default=DEFAULT_LOG_LEVEL, help="Logging level of the command line runner.")

    inner_tolerance: float = environ.var(
        default=INNER_TOLERANCE,
        help="Stopping tolerance of the inner fixed-point sweeps.",
        converter=float,
    )
    inner_max_sweeps: int = environ.var(
        default=INNER_MAX_SWEEPS,
        help="Maximum number of inner fixed-point sweeps.",
        converter=int,
    )
    divergence_window: int = environ.var(
        default=DIVERGENCE_WINDOW,
        help="Number of consecutive growing sweeps after which the inner iteration is declared divergent.",
        converter=int,
    )
    mean_zero_tolerance: float = environ.var(
        default=MEAN_ZERO_TOLERANCE,
        help="Relative tolerance on the mean of fields entering homogeneous norms.",
        converter=float,
    )
    sphere_tolerance: float = environ.var(
        default=SPHERE_TOLERANCE,
        help="Tolerance on the unit length of director values.",
        converter=float,
    )
    neumann_tolerance: float = environ.var(
        default=NEUMANN_TOLERANCE,
        help="Increment tolerance of the Neumann series for the inverse Jacobian.",
        converter=float,
    )
    neumann_max_terms: int = environ.var(
        default=NEUMANN_MAX_TERMS,
        help="Maximum power kept in the Neumann series.",
        converter=int,
    )
    resolution_drift: float = environ.var(
        default=RESOLUTION_DRIFT,
        help="Accepted relative drift of empirical constants under resolution doubling.",
        converter=float,
    )
    residual_floor: float = environ.var(
        default=RESIDUAL_FLOOR,
        help="Floor added to residuals before forming ratios between them.",
        converter=float,
    )
