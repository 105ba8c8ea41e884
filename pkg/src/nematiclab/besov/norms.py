"""
Homogeneous Besov norms, their heat-flow characterization and scaling checks.
"""

import logging
import math

import numpy as np
import scipy.special

from nematiclab.besov.decomposition import block_range, block_values, require_mean_zero
from nematiclab.common.exceptions import (
    BesovIndexError,
    EmbeddingHypothesisError,
    ScalingError,
    SphereConstraintError,
)
from nematiclab.config.settings.services import LabConfiguration
from nematiclab.domain.grid import Grid
from nematiclab.domain.indices import BesovIndex, reciprocal
from nematiclab.spectral import kernels
from nematiclab.spectral.field import SpectralField, inverse_transform, lp_norm
from nematiclab.spectral.kernels import RealArray
from nematiclab.spectral.operators import gradient

HEAT_BATCH = 16
ACTIVE_MODE_THRESHOLD = 1e-12
UPPER_GAMMA_SWITCH = 600.0


def sequence_norm(values: RealArray, r: float) -> float:
    """ℓ^r norm of a nonnegative sequence, r = ∞ being the maximum."""
    if values.size == 0:
        return 0.0
    if math.isinf(r):
        return float(np.max(values))
    return float(np.sum(values**r) ** (1.0 / r))


def block_norms(f: SpectralField, p: float) -> tuple[tuple[int, ...], RealArray]:
    """
    L^p norms of every dyadic block.

    :return: The block indices and their grid L^p norms.
    """
    indices, values = block_values(f)
    return indices, np.asarray(lp_norm(values, f.grid, p))


def besov_norm(f: SpectralField, idx: BesovIndex) -> float:
    """
    Homogeneous Besov norm ‖(2^{sq}‖Δ̇_q f‖_{L^p})_q‖_{ℓ^r}.

    :param f: Mean-zero field, any number of components (pointwise Euclidean magnitude).
    :param idx: The index (s, p, r).
    :return: The norm.
    """
    indices, norms = block_norms(f, idx.p)
    weighted = 2.0 ** (idx.s * np.asarray(indices, dtype=np.float64)) * norms
    return sequence_norm(weighted, idx.r)


def geometric_time_grid(q_min: int, q_max: int, ratio: float = 2.0, padding: int = 0) -> RealArray:
    """
    Geometric times spanning the heat scales of the dyadic blocks.

    :param q_min: Lowest block index.
    :param q_max: Highest block index.
    :param ratio: Ratio of consecutive times, above one.
    :param padding: Extra octaves of block index added on both ends.
    :return: Times from 2^{−2(q_max + padding)} to 2^{−2(q_min − padding)}.
    """
    if ratio <= 1.0:
        raise ValueError(f"Time grid ratio must exceed one, got {ratio}")
    first = 2.0 ** (-2 * (q_max + padding))
    last = 2.0 ** (-2 * (q_min - padding))
    count = math.ceil(math.log(last / first) / math.log(ratio) - 1e-9) + 1
    return np.geomspace(first, last, max(count, 2))


def default_time_grid(grid: Grid) -> RealArray:
    return geometric_time_grid(*block_range(grid))


def heat_lp_profile(f: SpectralField, p: float, times: RealArray) -> RealArray:
    """‖e^{tΔ}f‖_{L^p} at every requested time, evaluated in batches of time levels."""
    squared = kernels.wavenumber_squared(f.grid)
    profile = []
    for start in range(0, times.size, HEAT_BATCH):
        chunk = times[start : start + HEAT_BATCH]
        decay = np.exp(-squared[np.newaxis] * chunk.reshape(-1, *(1,) * f.grid.dim))[:, np.newaxis]
        values = inverse_transform(decay * f.fourier, f.grid.dim)
        profile.append(np.atleast_1d(lp_norm(values, f.grid, p)))
    return np.concatenate(profile)


def lowest_active_rate(f: SpectralField) -> float:
    """Smallest |ξ|² carrying a nonzero coefficient, the decay rate of the heat flow at late times."""
    magnitude = np.max(np.abs(f.fourier), axis=0)
    active = magnitude > ACTIVE_MODE_THRESHOLD * max(float(np.max(magnitude)), 1e-300)
    squared = kernels.wavenumber_squared(f.grid)
    active &= squared > 0.0
    return float(np.min(squared[active])) if np.any(active) else 0.0


def scaled_upper_gamma(a: float, x: float) -> float:
    """e^x Γ(a, x), switching to its asymptotic expansion where e^x overflows."""
    if x > UPPER_GAMMA_SWITCH:
        return float(x ** (a - 1.0) * (1.0 + (a - 1.0) / x + (a - 1.0) * (a - 2.0) / x**2))
    return float(math.exp(x) * scipy.special.gamma(a) * scipy.special.gammaincc(a, x))


def heat_characterization_norm(f: SpectralField, idx: BesovIndex, t_grid: RealArray | None = None) -> float:
    """
    Heat-flow form of a negative-regularity Besov norm: the L^r(dt/t) norm of t^{−s/2}‖e^{tΔ}f‖_{L^p}.

    The interior uses the trapezoid rule in ln t over ``t_grid``. Below the first time the heat flow is
    replaced by f itself; beyond the last time it decays at the rate of the lowest active frequency,
    which is integrated in closed form.

    :param f: Mean-zero field.
    :param idx: Index with s < 0.
    :param t_grid: Increasing positive times, by default the ratio-two grid of the block range.
    :return: The quadrature value.
    """
    if idx.s >= 0.0:
        raise BesovIndexError(f"The heat characterization needs s < 0, got s = {idx.s}")
    require_mean_zero(f)
    times = default_time_grid(f.grid) if t_grid is None else np.asarray(t_grid, dtype=np.float64)
    if f.max_abs() == 0.0:
        return 0.0
    exponent = -idx.s / 2.0
    profile = heat_lp_profile(f, idx.p, times)
    weighted = times**exponent * profile
    rate = lowest_active_rate(f)
    initial_norm = f.norm(idx.p)
    first, last = float(times[0]), float(times[-1])

    if math.isinf(idx.r):
        peak = float(np.max(weighted))
        head = first**exponent * initial_norm
        tail = 0.0
        if rate > 0.0 and exponent / rate > last:
            turning = exponent / rate
            tail = turning**exponent * profile[-1] * math.exp(-rate * (turning - last))
        return max(peak, head, tail)

    power = exponent * idx.r
    interior = float(np.trapezoid(weighted**idx.r, x=np.log(times)))
    head = initial_norm**idx.r * first**power / power
    tail = 0.0
    if rate > 0.0:
        scaled = idx.r * rate
        tail = profile[-1] ** idx.r * scaled ** (-power) * scaled_upper_gamma(power, scaled * last)
    value = (interior + head + tail) ** (1.0 / idx.r)
    logging.debug(f"[BESOV] Heat characterization {idx}: interior={interior:.3e} head={head:.3e} tail={tail:.3e}")
    return float(value)


def lr_in_time_norm(f: SpectralField, p: float, r: float, t_grid: RealArray | None = None) -> float:
    """‖e^{tΔ}f‖_{L^r_t L^p_x}, the heat characterization at s = −2/r."""
    if math.isinf(r):
        raise BesovIndexError("The time Lebesgue norm of the heat flow needs a finite r")
    return heat_characterization_norm(f, BesovIndex(s=-2.0 / r, p=p, r=r), t_grid)


def embedding_ratio(f: SpectralField, idx1: BesovIndex, idx2: BesovIndex) -> float:
    """
    Ratio of the target to the source norm of the embedding Ḃ^{s}_{p1,r1} ⊂ Ḃ^{s − N(1/p1 − 1/p2)}_{p2,r2}.

    :param f: Mean-zero field.
    :param idx1: Source index.
    :param idx2: Target index.
    :return: The ratio, 0 when both norms vanish.
    """
    dim = f.grid.dim
    if idx1.p > idx2.p or idx1.r > idx2.r:
        raise EmbeddingHypothesisError(f"Embedding {idx1} -> {idx2} needs p1 <= p2 and r1 <= r2")
    expected = idx1.s - dim * (reciprocal(idx1.p) - reciprocal(idx2.p))
    if not math.isclose(idx2.s, expected, abs_tol=1e-12):
        raise EmbeddingHypothesisError(f"Embedding {idx1} -> {idx2} needs target regularity {expected}")
    source = besov_norm(f, idx1)
    target = besov_norm(f, idx2)
    if source == 0.0:
        return 0.0
    return target / source


def require_unit_director(d0: SpectralField) -> float:
    """
    Raise :class:`SphereConstraintError` unless every director value has unit length.

    :return: The worst deviation ‖|d0| − 1‖_∞.
    """
    with LabConfiguration.use() as config:
        tolerance = config.sphere_tolerance
    deviation = float(np.max(np.abs(np.sqrt(np.sum(d0.values**2, axis=0)) - 1.0)))
    if deviation > tolerance:
        raise SphereConstraintError(f"Director leaves the unit sphere by {deviation:.3e}")
    return deviation


def smallness_eta(a0: SpectralField, u0: SpectralField, d0: SpectralField, p: float, r: float) -> float:
    """
    Size η = ‖a0‖_∞ + ‖u0‖_{Ḃ^{N/p−1}_{p,r}} + ‖∇d0‖_{Ḃ^{N/p−1}_{p,r}} of the initial data.

    :param a0: Density perturbation.
    :param u0: Mean-zero initial velocity.
    :param d0: Unit initial director.
    :param p: Spatial index of the critical space.
    :param r: Summation index of the critical space.
    :return: η.
    """
    require_unit_director(d0)
    index = BesovIndex.critical(u0.grid.dim, p, r)
    eta = a0.max_abs() + besov_norm(u0, index) + besov_norm(gradient(d0), index)
    logging.debug(f"[BESOV] Smallness {eta:.4e} at {index}")
    return eta


def smallness_holds(eta: float, c0: float) -> bool:
    return eta <= c0


def rescale_field(f: SpectralField, lam_power: int, factor: float = 1.0) -> SpectralField:
    """
    Dyadic rescaling x ↦ λx with λ = 2^{lam_power}: the values are kept on a box λ times smaller,
    which moves every dyadic block up by ``lam_power`` indices.

    :param f: Field to rescale.
    :param lam_power: Integer power of two.
    :param factor: Amplitude multiplier, λ for velocities and λ² for pressure gradients.
    :return: The rescaled field.
    """
    if isinstance(lam_power, bool) or not isinstance(lam_power, int):
        raise ScalingError(f"Only dyadic scalings 2^k with integer k are exact on the grid, got {lam_power!r}")
    grid = f.grid.shrunk(2.0**lam_power)
    return SpectralField(grid=grid, values=f.values * factor)


def critical_scaling_ratio(u0: SpectralField, p: float, r: float, lam_power: int = 1) -> float:
    """Ratio of the critical Besov norms of λu0(λ·) and u0; one for exact invariance."""
    index = BesovIndex.critical(u0.grid.dim, p, r)
    original = besov_norm(u0, index)
    rescaled = besov_norm(rescale_field(u0, lam_power, 2.0**lam_power), index)
    return rescaled / original if original > 0.0 else 1.0
