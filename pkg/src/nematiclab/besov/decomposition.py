"""
Homogeneous Littlewood-Paley decomposition on the periodic grid.

The cutoff χ equals one on [0, 1/2], zero on [1, ∞) and follows a quintic smoothstep in between.
Block ``q`` uses φ_q(ξ) = χ(|ξ|/2^{q+1}) − χ(|ξ|/2^q), supported in the annulus 2^{q−1} ≤ |ξ| ≤ 2^{q+1}.
The block range telescopes to exactly one on every nonzero grid frequency.
"""

from __future__ import annotations

import dataclasses
import functools
import logging
import math

import numpy as np

from nematiclab.common.exceptions import MeanZeroViolationError
from nematiclab.config.settings.services import LabConfiguration
from nematiclab.domain.grid import Grid
from nematiclab.spectral import kernels
from nematiclab.spectral.field import SpectralField, inverse_transform
from nematiclab.spectral.kernels import RealArray


def cutoff(radius: RealArray) -> RealArray:
    """Quintic smoothstep χ: one below 1/2, zero above 1."""
    s = np.clip(2.0 * (radius - 0.5), 0.0, 1.0)
    return 1.0 - s**3 * (10.0 - 15.0 * s + 6.0 * s**2)  # type: ignore[no-any-return]


def block_range(grid: Grid) -> tuple[int, int]:
    """
    Dyadic indices whose annuli cover every nonzero grid frequency.

    :return: (q_min, q_max) with 2^{q_min} ≤ 2π/L and 2^{q_max} ≥ max |ξ|.
    """
    lowest = grid.fundamental_frequency
    highest = float(np.max(kernels.frequency_magnitude(grid)))
    return math.floor(math.log2(lowest)), math.ceil(math.log2(highest))


@functools.lru_cache(maxsize=16)
def dyadic_multipliers(grid: Grid) -> tuple[tuple[int, ...], RealArray]:
    """
    All block multipliers of a grid.

    :return: The block indices and an array of shape (Q, 1, M, ..., M) holding φ_q.
    """
    q_min, q_max = block_range(grid)
    indices = tuple(range(q_min, q_max + 1))
    magnitude = kernels.frequency_magnitude(grid)
    multipliers = np.stack(
        [cutoff(magnitude / 2.0 ** (q + 1)) - cutoff(magnitude / 2.0**q) for q in indices]
    )[:, np.newaxis]
    multipliers.setflags(write=False)
    return indices, multipliers


def require_mean_zero(f: SpectralField) -> None:
    """
    Raise :class:`MeanZeroViolationError` when a component mean exceeds the configured tolerance,
    taken relative to max(1, max |f|).
    """
    with LabConfiguration.use() as config:
        tolerance = config.mean_zero_tolerance
    scale = max(1.0, f.max_abs())
    worst = float(np.max(np.abs(f.mean())))
    if worst > tolerance * scale:
        raise MeanZeroViolationError(f"Field mean {worst:.3e} exceeds {tolerance:.1e} x {scale:.3e}")


def block_values(f: SpectralField) -> tuple[tuple[int, ...], RealArray]:
    """
    Real-space values of every dyadic block, computed with a single batched inverse transform.

    :param f: Mean-zero field.
    :return: The block indices and an array of shape (Q, c, M, ..., M).
    """
    require_mean_zero(f)
    indices, multipliers = dyadic_multipliers(f.grid)
    return indices, inverse_transform(multipliers * f.fourier, f.grid.dim)


@dataclasses.dataclass(frozen=True)
class DyadicDecomposition:
    """
    Littlewood-Paley blocks of a field.

    :ivar blocks: Pairs (q, Δ̇_q f) in increasing q.
    :ivar q_min: Lowest block index.
    :ivar q_max: Highest block index.
    """

    blocks: tuple[tuple[int, SpectralField], ...]
    q_min: int
    q_max: int

    def block(self, q: int) -> SpectralField:
        for index, block in self.blocks:
            if index == q:
                return block
        raise KeyError(f"Block {q} is outside [{self.q_min}, {self.q_max}]")

    def reconstruct(self) -> SpectralField:
        """Sum of all blocks, equal to the mean-zero part of the decomposed field."""
        grid = self.blocks[0][1].grid
        return SpectralField(grid=grid, values=np.sum([block.values for _, block in self.blocks], axis=0))


def dyadic_blocks(f: SpectralField) -> DyadicDecomposition:
    """
    Decompose a mean-zero field into homogeneous dyadic blocks.

    :param f: Field with zero mean in every component.
    :return: The decomposition over the full block range of the grid.
    """
    indices, values = block_values(f)
    logging.debug(f"[BESOV] Decomposed into blocks {indices[0]}..{indices[-1]}")
    return DyadicDecomposition(
        blocks=tuple((q, SpectralField(grid=f.grid, values=block)) for q, block in zip(indices, values, strict=True)),
        q_min=indices[0],
        q_max=indices[-1],
    )
