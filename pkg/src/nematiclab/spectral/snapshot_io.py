"""
ELF1 snapshot files: magic ``ELFIELD1``, little-endian u32 N, u32 M, f64 L, f64 time, u32 component count,
then the components as little-endian f64 in row-major order.
"""

import logging
from pathlib import Path

import numpy as np
import pydantic

from nematiclab.common.exceptions import SnapshotFormatError
from nematiclab.config.settings.defaults import SNAPSHOT_MAGIC
from nematiclab.domain.grid import Grid
from nematiclab.spectral.field import SpectralField

HEADER_DTYPE = np.dtype(
    [
        ("magic", "S8"),
        ("dim", "<u4"),
        ("points", "<u4"),
        ("box_length", "<f8"),
        ("time", "<f8"),
        ("components", "<u4"),
    ]
)


def write_snapshot(path: Path, field: SpectralField, time: float) -> Path:
    """
    Write a field to an ELF1 file.

    :param path: Destination file.
    :param field: Field to store.
    :param time: Time stamp recorded in the header.
    :return: The written path.
    """
    header = np.array(
        [(SNAPSHOT_MAGIC, field.grid.dim, field.grid.points_per_axis, field.grid.box_length, time, field.components)],
        dtype=HEADER_DTYPE,
    )
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as handle:
        handle.write(header.tobytes())
        handle.write(np.ascontiguousarray(field.values, dtype="<f8").tobytes())
    logging.debug(f"[SPECTRAL] Snapshot written to {path}")
    return path


def read_snapshot(path: Path) -> tuple[SpectralField, float]:
    """
    Read an ELF1 file.

    :param path: Source file.
    :return: The stored field and its time stamp.
    """
    payload = path.read_bytes()
    if len(payload) < HEADER_DTYPE.itemsize:
        raise SnapshotFormatError(f"{path} is shorter than an ELF1 header")
    header = np.frombuffer(payload[: HEADER_DTYPE.itemsize], dtype=HEADER_DTYPE)[0]
    if bytes(header["magic"]) != SNAPSHOT_MAGIC:
        raise SnapshotFormatError(f"{path} does not start with the ELF1 magic")
    try:
        grid = Grid(
            dim=int(header["dim"]), points_per_axis=int(header["points"]), box_length=float(header["box_length"])
        )
    except pydantic.ValidationError as error:
        raise SnapshotFormatError(f"{path} announces an invalid grid: {error}") from error
    components = int(header["components"])
    expected = components * grid.points_per_axis**grid.dim
    data = np.frombuffer(payload[HEADER_DTYPE.itemsize :], dtype="<f8")
    if data.size != expected:
        raise SnapshotFormatError(f"{path} holds {data.size} values, header announces {expected}")
    return SpectralField(grid=grid, values=data.reshape(components, *grid.shape)), float(header["time"])
