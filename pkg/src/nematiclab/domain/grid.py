import functools
import math

import numpy as np
import numpy.typing as npt
import pydantic
from pydantic import Field, field_validator

from nematiclab.config.settings.defaults import DEFAULT_BOX_LENGTH
from nematiclab.domain.base import FrozenModel

MINIMUM_POINTS_PER_AXIS = 8


class Grid(FrozenModel):
    """
    Isotropic periodic grid on the torus [0, L)^N.

    :ivar dim: Spatial dimension N, two or three.
    :ivar points_per_axis: Number of points M on every axis, a power of two.
    :ivar box_length: Period L of every axis.
    """

    dim: int = Field(ge=2, le=3)
    points_per_axis: int
    box_length: float = Field(default=DEFAULT_BOX_LENGTH, gt=0.0)

    @field_validator("points_per_axis", mode="after")
    @classmethod
    def require_power_of_two(cls, value: int) -> int:
        if value < MINIMUM_POINTS_PER_AXIS or value & (value - 1):
            raise ValueError(f"points_per_axis must be a power of two not below {MINIMUM_POINTS_PER_AXIS}, got {value}")
        return value

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_axis,) * self.dim

    @property
    def spacing(self) -> float:
        return self.box_length / self.points_per_axis

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    @property
    def volume(self) -> float:
        return self.box_length**self.dim

    @property
    def fundamental_frequency(self) -> float:
        """Smallest nonzero angular frequency 2π/L."""
        return 2.0 * math.pi / self.box_length

    def coordinates(self) -> npt.NDArray[np.float64]:
        """
        Grid point positions.

        :return: Array of shape (N, M, ..., M) holding x_i at every point.
        """
        return _coordinates(self.dim, self.points_per_axis, self.box_length)

    def refined(self, factor: int = 2) -> "Grid":
        """Same box with ``factor`` times as many points per axis."""
        return Grid.model_validate(self.model_dump() | {"points_per_axis": self.points_per_axis * factor})

    def shrunk(self, factor: float) -> "Grid":
        """Same point count on a box ``factor`` times shorter."""
        if not factor > 0.0:
            raise ValueError(f"Shrink factor must be positive, got {factor}")
        return Grid.model_validate(self.model_dump() | {"box_length": self.box_length / factor})


@functools.lru_cache(maxsize=32)
def _coordinates(dim: int, points: int, box_length: float) -> npt.NDArray[np.float64]:
    axis = np.arange(points) * (box_length / points)
    coordinates = np.stack(np.meshgrid(*([axis] * dim), indexing="ij"))
    coordinates.setflags(write=False)
    return coordinates


class PhysicalConstants(FrozenModel):
    """
    Viscosity and director coupling constants.

    :ivar nu: Viscosity ν.
    :ivar lambda_: Elastic coupling λ, given as ``lambda`` in configuration files.
    :ivar gamma: Director relaxation γ.
    """

    nu: pydantic.PositiveFloat = 1.0
    lambda_: pydantic.PositiveFloat = Field(default=1.0, alias="lambda")
    gamma: pydantic.PositiveFloat = 1.0
