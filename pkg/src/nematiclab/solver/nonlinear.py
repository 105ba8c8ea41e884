"""
Pointwise nonlinear terms of the system on value arrays shaped (..., c, M, ..., M).
Gradients follow the ``i * c + j`` ↦ ∂_i f_j layout of :func:`nematiclab.spectral.kernels.gradient_hat`.
"""

import numpy as np

from nematiclab.spectral.kernels import RealArray


def split_gradient(gradient: RealArray, dim: int) -> RealArray:
    """View a gradient of shape (..., N * c, *spatial) as (..., N, c, *spatial)."""
    lead = gradient.shape[: -(dim + 1)]
    return gradient.reshape(*lead, dim, -1, *gradient.shape[-dim:])


def convective(velocity: RealArray, gradient: RealArray, dim: int) -> RealArray:
    """(u·∇)f_j = Σ_i u_i ∂_i f_j."""
    split = split_gradient(gradient, dim)
    return np.sum(np.expand_dims(velocity, axis=-(dim + 1)) * split, axis=-(dim + 2))  # type: ignore[no-any-return]


def director_stress(gradient: RealArray, dim: int) -> RealArray:
    """
    (∇d⊙∇d)_{ij} = Σ_k ∂_i d_k ∂_j d_k.

    :param gradient: Director gradient, shape (..., N * N, *spatial).
    :param dim: Spatial dimension.
    :return: The symmetric stress with component ``i * N + j``.
    """
    split = split_gradient(gradient, dim)
    rows = np.expand_dims(split, axis=-(dim + 2))
    columns = np.expand_dims(split, axis=-(dim + 3))
    stress = np.sum(rows * columns, axis=-(dim + 1))
    lead = gradient.shape[: -(dim + 1)]
    return stress.reshape(*lead, dim * dim, *gradient.shape[-dim:])  # type: ignore[no-any-return]


def gradient_energy(gradient: RealArray, dim: int) -> RealArray:
    """|∇d|² as a one-component array."""
    return np.sum(gradient**2, axis=-(dim + 1), keepdims=True)  # type: ignore[no-any-return]
