"""
Solver state: one iterate of the scheme sampled on the whole time grid, and its on-disk layout.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from pathlib import Path

import numpy as np

from nematiclab.common.exceptions import ComponentCountError, SnapshotFormatError, TimeGridMismatchError
from nematiclab.config.settings.defaults import TRAJECTORY_METADATA_FILENAME
from nematiclab.domain.base import FrozenModel
from nematiclab.domain.grid import Grid, PhysicalConstants
from nematiclab.duhamel.series import TimeSeriesField
from nematiclab.spectral.field import SpectralField
from nematiclab.spectral.kernels import RealArray
from nematiclab.spectral.snapshot_io import read_snapshot, write_snapshot

FIELD_NAMES = ("a", "u", "d", "grad_pi")


@dataclasses.dataclass(frozen=True, eq=False)
class StateSnapshot:
    time: float
    a: SpectralField
    u: SpectralField
    d: SpectralField
    grad_pi: SpectralField


@dataclasses.dataclass(frozen=True, eq=False)
class Trajectory:
    """
    Density perturbation, velocity, director and pressure gradient on one uniform time grid.

    :ivar a: Density perturbation, one component.
    :ivar u: Velocity, N components.
    :ivar d: Director, N components.
    :ivar grad_pi: Pressure gradient, N components.
    :ivar constants: Physical constants the trajectory was computed with.
    :ivar iteration: Outer iteration that produced it, zero for the starting guess.
    """

    a: TimeSeriesField
    u: TimeSeriesField
    d: TimeSeriesField
    grad_pi: TimeSeriesField
    constants: PhysicalConstants
    iteration: int = 0

    def __post_init__(self) -> None:
        for series in (self.u, self.d, self.grad_pi):
            self.a.require_aligned(series)
        if self.a.components != 1:
            raise ComponentCountError(f"Density perturbation needs one component, got {self.a.components}")
        dim = self.grid.dim
        for name in ("u", "d", "grad_pi"):
            count = getattr(self, name).components
            if count != dim:
                raise ComponentCountError(f"Field {name} needs {dim} components, got {count}")
        if not self.a.uniform:
            raise TimeGridMismatchError("Trajectories live on a uniform time grid")

    @property
    def grid(self) -> Grid:
        return self.a.grid

    @property
    def times(self) -> RealArray:
        return self.a.times

    @property
    def levels(self) -> int:
        return self.a.levels

    @property
    def horizon(self) -> float:
        return self.a.horizon

    @property
    def step(self) -> float:
        return float(self.times[1] - self.times[0]) if self.levels > 1 else 0.0

    def snapshot(self, k: int) -> StateSnapshot:
        return StateSnapshot(
            time=float(self.times[k]), a=self.a.at(k), u=self.u.at(k), d=self.d.at(k), grad_pi=self.grad_pi.at(k)
        )

    @property
    def snapshots(self) -> tuple[StateSnapshot, ...]:
        return tuple(self.snapshot(k) for k in range(self.levels))

    def difference(self, other: Trajectory) -> Trajectory:
        """Fieldwise increment ``self − other``, used for the iteration increments."""
        return dataclasses.replace(
            self,
            a=self.a - other.a,
            u=self.u - other.u,
            d=self.d - other.d,
            grad_pi=self.grad_pi - other.grad_pi,
        )

    def strided(self, stride: int) -> Trajectory:
        """Every ``stride``-th time level, the first one included."""
        if stride == 1:
            return self
        indices = np.arange(0, self.levels, stride)

        def pick(series: TimeSeriesField) -> TimeSeriesField:
            return TimeSeriesField(grid=series.grid, times=series.times[indices], values=series.values[indices])

        return dataclasses.replace(
            self, a=pick(self.a), u=pick(self.u), d=pick(self.d), grad_pi=pick(self.grad_pi)
        )


class TrajectoryMetadata(FrozenModel):
    """
    Index file written next to the ELF1 snapshots of a saved trajectory.

    :ivar grid: Spatial grid of every snapshot.
    :ivar constants: Physical constants of the run.
    :ivar times: Stored time levels.
    :ivar iteration: Outer iteration of the stored iterate.
    :ivar files: Field name mapped to its snapshot file names, one per time level.
    """

    grid: Grid
    constants: PhysicalConstants
    times: list[float]
    iteration: int = 0
    files: dict[str, list[str]]


def snapshot_name(field: str, k: int) -> str:
    return f"{field}_{k:05d}.elf"


def save_trajectory(trajectory: Trajectory, directory: Path, stride: int = 1) -> Path:
    """
    Store a trajectory as ELF1 snapshots plus a ``trajectory.json`` index.

    :param trajectory: Trajectory to store.
    :param directory: Target directory, created when missing.
    :param stride: Keep every ``stride``-th time level.
    :return: The path of the index file.
    """
    stored = trajectory.strided(stride)
    directory.mkdir(parents=True, exist_ok=True)
    files: dict[str, list[str]] = {name: [] for name in FIELD_NAMES}
    for k, state in enumerate(stored.snapshots):
        for name in FIELD_NAMES:
            filename = snapshot_name(name, k)
            write_snapshot(directory / filename, getattr(state, name), state.time)
            files[name].append(filename)
    metadata = TrajectoryMetadata(
        grid=stored.grid,
        constants=stored.constants,
        times=[float(t) for t in stored.times],
        iteration=stored.iteration,
        files=files,
    )
    index = directory / TRAJECTORY_METADATA_FILENAME
    index.write_text(metadata.model_dump_json(by_alias=True, indent=2), encoding="utf-8")
    logging.info(f"[SOLVER] Stored {stored.levels} time level(s) in {directory}")
    return index


def load_trajectory(directory: Path) -> Trajectory:
    """
    Read a trajectory written by :func:`save_trajectory`.

    :param directory: Directory holding ``trajectory.json``.
    :return: The stored trajectory.
    """
    index = directory / TRAJECTORY_METADATA_FILENAME
    try:
        metadata = TrajectoryMetadata.model_validate_json(index.read_text(encoding="utf-8"))
    except OSError as error:
        raise SnapshotFormatError(f"Cannot read trajectory index {index}: {error}") from error

    series = {}
    for name in FIELD_NAMES:
        names = metadata.files.get(name, [])
        if len(names) != len(metadata.times):
            raise SnapshotFormatError(f"Index lists {len(names)} {name} snapshot(s) for {len(metadata.times)} times")
        fields = []
        for filename, expected_time in zip(names, metadata.times, strict=True):
            field, time = read_snapshot(directory / filename)
            if field.grid != metadata.grid:
                raise SnapshotFormatError(f"{filename} lives on {field.grid}, index announces {metadata.grid}")
            if not math.isclose(time, expected_time, rel_tol=1e-12, abs_tol=1e-15):
                raise SnapshotFormatError(f"{filename} is stamped t = {time}, index announces {expected_time}")
            fields.append(field)
        series[name] = TimeSeriesField.from_fields(metadata.times, fields)
    logging.info(f"[SOLVER] Loaded {len(metadata.times)} time level(s) from {directory}")
    return Trajectory(constants=metadata.constants, iteration=metadata.iteration, **series)
