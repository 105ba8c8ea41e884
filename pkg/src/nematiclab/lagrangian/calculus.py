"""
Pointwise matrix algebra and derivatives of level-stacked fields in Lagrangian coordinates.

Every array carries one leading axis of time levels, then its component axes, then the N spatial axes.
Matrix fields have shape (L, N, N, M, ..., M). Gradients use the row-derivative layout [b, j] = ∂_b f_j, so the
Jacobian D_y f of the text is the transpose of :func:`y_gradient`.
"""

import numpy as np

from nematiclab.domain.grid import Grid
from nematiclab.spectral import kernels
from nematiclab.spectral.field import forward_transform, inverse_transform
from nematiclab.spectral.kernels import RealArray


def identity(grid: Grid, levels: int) -> RealArray:
    eye = np.eye(grid.dim).reshape(1, grid.dim, grid.dim, *(1,) * grid.dim)
    return np.broadcast_to(eye, (levels, grid.dim, grid.dim, *grid.shape)).copy()


def matmul(left: RealArray, right: RealArray) -> RealArray:
    return np.einsum("lij...,ljk...->lik...", left, right)  # type: ignore[no-any-return]


def transpose(matrix: RealArray) -> RealArray:
    return np.swapaxes(matrix, 1, 2)


def apply(matrix: RealArray, vector: RealArray) -> RealArray:
    """(M v)_i = Σ_j M_ij v_j."""
    return np.einsum("lij...,lj...->li...", matrix, vector)  # type: ignore[no-any-return]


def contract(matrix: RealArray, gradient: RealArray) -> RealArray:
    """
    Double contraction over the two leading indices, (M : G)_… = Σ_{b,i} M_bi G_bi….

    :param matrix: Shape (L, N, N, *spatial).
    :param gradient: Shape (L, N, N, ..., *spatial) with any number of trailing component axes.
    :return: Shape (L, ..., *spatial).
    """
    return np.einsum("lbi...,lbi...->l...", matrix, gradient)  # type: ignore[no-any-return]


def frobenius(left: RealArray, right: RealArray, dim: int) -> RealArray:
    """Σ over every component axis of the pointwise product; one component is kept."""
    product = left * right
    component_axes = tuple(range(1, product.ndim - dim))
    return np.sum(product, axis=component_axes)[:, np.newaxis]  # type: ignore[no-any-return]


def determinant(matrix: RealArray) -> RealArray:
    pointwise = np.moveaxis(matrix, (1, 2), (-2, -1))
    return np.linalg.det(pointwise)  # type: ignore[no-any-return]


def inverse(matrix: RealArray) -> RealArray:
    pointwise = np.moveaxis(matrix, (1, 2), (-2, -1))
    return np.moveaxis(np.linalg.inv(pointwise), (-2, -1), (1, 2))  # type: ignore[no-any-return]


def row_sum_norm(matrix: RealArray) -> RealArray:
    """Largest pointwise matrix ∞-norm of every level."""
    rows = np.sum(np.abs(matrix), axis=2)
    return np.max(rows.reshape(rows.shape[0], -1), axis=1)  # type: ignore[no-any-return]


def flatten_components(values: RealArray, dim: int) -> RealArray:
    return values.reshape(values.shape[0], -1, *values.shape[-dim:])


def y_gradient(values: RealArray, grid: Grid) -> RealArray:
    """
    Spectral gradient of periodic fields.

    :param values: Shape (L, c1, ..., *spatial).
    :return: Shape (L, N, c1, ..., *spatial) with [b, ...] = ∂_b.
    """
    component_shape = values.shape[1 : -grid.dim]
    flat = flatten_components(values, grid.dim)
    gradient = inverse_transform(kernels.gradient_hat(forward_transform(flat, grid.dim), grid), grid.dim)
    return gradient.reshape(values.shape[0], grid.dim, *component_shape, *grid.shape)


def y_divergence(matrix: RealArray, grid: Grid) -> RealArray:
    """Σ_b ∂_b M_b… over the first component index."""
    component_shape = matrix.shape[2 : -grid.dim]
    flat = flatten_components(matrix, grid.dim)
    divergence = inverse_transform(kernels.divergence_hat(forward_transform(flat, grid.dim), grid), grid.dim)
    return divergence.reshape(matrix.shape[0], *component_shape, *grid.shape)


def x_gradient(values: RealArray, jacobian_inverse: RealArray, grid: Grid) -> RealArray:
    """
    Eulerian gradient of a pulled-back field, ∇_x f ∘ X = ᵗA ∇_y f.

    :param values: Shape (L, c1, ..., *spatial).
    :param jacobian_inverse: A of shape (L, N, N, *spatial).
    :return: Shape (L, N, c1, ..., *spatial).
    """
    return np.einsum("lbi...,lb...->li...", jacobian_inverse, y_gradient(values, grid))  # type: ignore[no-any-return]


def x_divergence(matrix: RealArray, jacobian_inverse: RealArray, grid: Grid) -> RealArray:
    """Eulerian divergence over the first index, Σ_{b,i} A_bi ∂_b M_i…, the non-divergence form ᵗA:∇M."""
    return contract(jacobian_inverse, y_gradient(matrix, grid))


def time_derivative(values: RealArray, times: RealArray) -> RealArray:
    """Centered differences inside the grid, one-sided of second order at both ends."""
    edge_order = 2 if times.size > 2 else 1  # noqa: PLR2004
    return np.gradient(values, times, axis=0, edge_order=edge_order)  # type: ignore[no-any-return]
