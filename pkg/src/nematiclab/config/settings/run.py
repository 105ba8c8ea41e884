"""
Schema of the TOML run files read by ``nematiclab simulate``.
"""

import tomllib
import typing
from pathlib import Path

import numpy as np
import numpy.typing as npt
import pydantic
from pydantic import Field, model_validator

from nematiclab.common.exceptions import ConfigurationError
from nematiclab.config.settings.defaults import (
    DEFAULT_BOX_LENGTH,
    DEFAULT_SCHEME_P,
    DEFAULT_SCHEME_R,
    DEFAULT_STEPS_PER_RUN,
    PICARD_MAX_ITERATIONS,
    PICARD_TOLERANCE,
    SMALLNESS_THRESHOLD,
)
from nematiclab.domain.base import FrozenModel
from nematiclab.domain.grid import Grid, PhysicalConstants
from nematiclab.domain.indices import WeightedExponentTable


class GridSection(FrozenModel):
    dim: int = Field(default=2, ge=2, le=3)
    points: int = Field(default=64, alias="M")
    box_length: float = Field(default=DEFAULT_BOX_LENGTH, alias="L", gt=0.0)

    def build(self) -> Grid:
        return Grid(dim=self.dim, points_per_axis=self.points, box_length=self.box_length)


class SnapshotPaths(FrozenModel):
    a: Path
    u: Path
    d: Path


class DataSection(FrozenModel):
    """
    Initial data: a built-in scenario with its parameters, or three ELF1 snapshots.
    """

    scenario: str | None = "zero"
    parameters: dict[str, float] = Field(default_factory=dict)
    seed: int = 0
    snapshots: SnapshotPaths | None = None

    @model_validator(mode="after")
    def require_single_source(self) -> typing.Self:
        if self.snapshots is not None and self.scenario not in (None, "zero"):
            raise ValueError("Give either a scenario or snapshot paths, not both")
        return self


class SchemeSection(FrozenModel):
    """
    Parameters of the outer iteration.

    :ivar r: Time index of the solution space; the unweighted ledger needs 1 < r < 2.
    :ivar p: Spatial index of the critical data space.
    :ivar horizon: Final time T.
    :ivar dt: Time step, T/256 when omitted.
    :ivar tol: Outer tolerance on the increment norm.
    :ivar n_max: Largest number of outer iterations.
    :ivar c0: Smallness threshold on the data size.
    :ivar smallness: ``enforce`` refuses data above ``c0``, ``warn`` only logs.
    :ivar normalize_director: Renormalize the director after every director step.
    :ivar regularization: Mollify and truncate the data at this level before iterating.
    :ivar weighted_p1: Index p1 of the weighted ledger, 0.8·N by default.
    :ivar weighted_p3: Index p3 of the weighted ledger, 4·N by default.
    """

    r: float = Field(default=DEFAULT_SCHEME_R, gt=1.0)
    p: float = Field(default=DEFAULT_SCHEME_P, gt=1.0)
    horizon: float = Field(default=1.0, alias="T", gt=0.0)
    dt: float | None = Field(default=None, gt=0.0)
    tol: float = Field(default=PICARD_TOLERANCE, gt=0.0)
    n_max: int = Field(default=PICARD_MAX_ITERATIONS, ge=1)
    c0: float = Field(default=SMALLNESS_THRESHOLD, gt=0.0)
    smallness: typing.Literal["enforce", "warn"] = "enforce"
    normalize_director: bool = False
    regularization: int | None = Field(default=None, ge=0)
    weighted_p1: float | None = Field(default=None, gt=1.0)
    weighted_p3: float | None = Field(default=None, gt=1.0)

    @property
    def steps(self) -> int:
        if self.dt is None:
            return DEFAULT_STEPS_PER_RUN
        return max(1, round(self.horizon / self.dt))

    @property
    def step(self) -> float:
        return self.horizon / self.steps

    def times(self) -> npt.NDArray[np.float64]:
        return np.linspace(0.0, self.horizon, self.steps + 1)

    @property
    def uses_unweighted_ledger(self) -> bool:
        return 1.0 < self.r < 2.0  # noqa: PLR2004

    def weighted_table(self, dim: int) -> WeightedExponentTable:
        p1 = self.weighted_p1 if self.weighted_p1 is not None else 0.8 * dim
        p3 = self.weighted_p3 if self.weighted_p3 is not None else 4.0 * dim
        return WeightedExponentTable.from_indices(dim, self.r, p1, p3)


class OutputSection(FrozenModel):
    directory: Path = Path("out")
    stride: int = Field(default=1, ge=1)


class RunConfiguration(FrozenModel):
    grid: GridSection = Field(default_factory=GridSection)
    constants: PhysicalConstants = Field(default_factory=PhysicalConstants)
    data: DataSection = Field(default_factory=DataSection)
    scheme: SchemeSection = Field(default_factory=SchemeSection)
    output: OutputSection = Field(default_factory=OutputSection)


def _dotted(location: tuple[int | str, ...]) -> str:
    return ".".join(str(part) for part in location)


def parse_run_configuration(text: str, source: str = "<string>") -> RunConfiguration:
    """
    Parse and validate a TOML run file.

    :param text: File contents.
    :param source: Name used in error messages.
    :return: The validated configuration.
    """
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as error:
        raise ConfigurationError(f"{source}: {error}") from error
    try:
        return RunConfiguration.model_validate(raw)
    except pydantic.ValidationError as error:
        problems = "; ".join(f"{_dotted(item['loc'])}: {item['msg']}" for item in error.errors())
        raise ConfigurationError(f"{source}: invalid key {problems}") from error


def load_run_configuration(path: Path) -> RunConfiguration:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as error:
        raise ConfigurationError(f"Cannot read run file {path}: {error}") from error
    return parse_run_configuration(text, source=str(path))


def resolved_configuration(configuration: RunConfiguration) -> dict[str, typing.Any]:
    """JSON-ready form of a configuration with every default filled in."""
    payload = configuration.model_dump(mode="json", by_alias=True)
    payload["scheme"]["dt"] = configuration.scheme.step
    return payload
