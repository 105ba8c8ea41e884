import dataclasses
import logging
import os

import numpy as np
import numpy.typing as npt
import scipy.fft

from nematiclab.config.settings.services import LabConfiguration


@dataclasses.dataclass
class SpectralBackend:
    """
    Service performing the discrete Fourier transforms of every spectral module.
    Transforms act on the trailing ``dim`` axes, leading axes (components, time levels) are batched.
    """

    workers: int = dataclasses.field(init=False, default=1)

    def __post_init__(self) -> None:
        with LabConfiguration.use() as initialized_config:
            self.initialize(initialized_config)

    def initialize(self, config: LabConfiguration) -> None:
        self.workers = config.threads if config.threads > 0 else (os.cpu_count() or 1)
        logging.debug(f"[SPECTRAL] FFT backend initialized with {self.workers} worker(s).")

    @staticmethod
    def _axes(dim: int) -> tuple[int, ...]:
        return tuple(range(-dim, 0))

    def forward(self, values: npt.NDArray[np.floating], dim: int) -> npt.NDArray[np.complexfloating]:
        """
        Forward transform over the trailing spatial axes.

        :param values: Real array whose last ``dim`` axes are spatial.
        :param dim: Spatial dimension.
        :return: The complex Fourier coefficients, unnormalised.
        """
        return scipy.fft.fftn(values, axes=self._axes(dim), workers=self.workers)

    def inverse(self, coefficients: npt.NDArray[np.complexfloating], dim: int) -> npt.NDArray[np.floating]:
        """
        Inverse transform over the trailing spatial axes, keeping the real part.

        :param coefficients: Fourier coefficients as produced by :meth:`forward`.
        :param dim: Spatial dimension.
        :return: The real field values.
        """
        return np.ascontiguousarray(scipy.fft.ifftn(coefficients, axes=self._axes(dim), workers=self.workers).real)
