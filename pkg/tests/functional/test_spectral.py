import math
from pathlib import Path

import numpy as np
import pytest

from nematiclab.common.exceptions import (
    AxisOutOfRangeError,
    ComponentCountError,
    GridMismatchError,
    NegativeTimeError,
    SnapshotFormatError,
)
from nematiclab.config.settings.defaults import SNAPSHOT_MAGIC
from nematiclab.domain.grid import Grid
from nematiclab.spectral.field import SpectralField
from nematiclab.spectral.interpolation import PeriodicInterpolator
from nematiclab.spectral.kernels import RealArray
from nematiclab.spectral.operators import (
    dealias,
    derivative,
    divergence,
    gradient,
    heat_semigroup,
    laplacian,
    leray_project,
    riesz_riesz,
    spectral_divergence_norm,
)
from nematiclab.spectral.snapshot_io import HEADER_DTYPE, read_snapshot, write_snapshot
from tests.analytic import cosine_mode
from tests.common import grid, max_gap, solenoidal_field, trigonometric_field


def test_grid_rejects_point_counts_that_are_not_powers_of_two() -> None:
    with pytest.raises(ValueError):
        Grid(dim=2, points_per_axis=24)
    with pytest.raises(ValueError):
        Grid(dim=4, points_per_axis=16)


def test_grid_geometry(grid32: Grid) -> None:
    assert grid32.shape == (32, 32)
    assert grid32.fundamental_frequency == pytest.approx(1.0)
    assert grid32.volume == pytest.approx(4.0 * math.pi**2)
    assert grid32.refined().points_per_axis == 64
    assert grid32.shrunk(2.0).box_length == pytest.approx(math.pi)


def test_derived_grids_are_validated(grid32: Grid) -> None:
    for factor in (0.0, -1.0):
        with pytest.raises(ValueError):
            grid32.shrunk(factor)
    with pytest.raises(ValueError):
        grid32.refined(0)
    with pytest.raises(ValueError):
        grid32.refined(3)


def test_derivative_of_a_single_mode(grid32: Grid) -> None:
    x1 = grid32.coordinates()[0]
    field = SpectralField(grid=grid32, values=np.sin(3.0 * x1))
    assert max_gap(derivative(field, 0).values[0], 3.0 * np.cos(3.0 * x1)) < 1e-10
    assert derivative(field, 1).max_abs() < 1e-10


def _fourth_order_difference(values: RealArray, spacing: float) -> RealArray:
    ahead, behind = np.roll(values, -1, axis=0), np.roll(values, 1, axis=0)
    far_ahead, far_behind = np.roll(values, -2, axis=0), np.roll(values, 2, axis=0)
    return (8.0 * (ahead - behind) - (far_ahead - far_behind)) / (12.0 * spacing)  # type: ignore[no-any-return]


def test_derivative_agrees_with_fourth_order_differences() -> None:
    errors = []
    for points in (32, 64):
        sample_grid = grid(points)
        field = trigonometric_field(sample_grid, seed=8)
        exact = derivative(field, 0).values[0]
        errors.append(max_gap(_fourth_order_difference(field.values[0], sample_grid.spacing), exact))
        assert errors[-1] < 5e-2 * float(np.max(np.abs(exact)))
    assert errors[0] / errors[1] > 12.0


def test_parseval_identity(grid32: Grid) -> None:
    field = trigonometric_field(grid32, components=2, seed=9)
    spectral = grid32.cell_volume / grid32.points_per_axis**grid32.dim * np.sum(np.abs(field.fourier) ** 2)
    assert field.norm(2.0) ** 2 == pytest.approx(float(spectral), rel=1e-10)


def test_derivative_rejects_axes_outside_the_grid(grid16: Grid) -> None:
    with pytest.raises(AxisOutOfRangeError):
        derivative(SpectralField.zeros(grid16), 2)


def test_laplacian_multiplies_a_mode_by_minus_its_squared_frequency(grid32: Grid) -> None:
    mode = cosine_mode(grid32, (2, 3))
    assert max_gap(laplacian(mode).values, -13.0 * mode.values) < 1e-9


def test_gradient_layout_and_divergence(grid32: Grid) -> None:
    x1, x2 = grid32.coordinates()
    field = SpectralField(grid=grid32, values=np.stack([np.sin(x1), np.cos(2.0 * x2)]))
    grad = gradient(field)
    assert grad.components == 4
    assert max_gap(grad.values[0], np.cos(x1)) < 1e-10
    assert max_gap(grad.values[3], -2.0 * np.sin(2.0 * x2)) < 1e-10
    assert max_gap(divergence(field).values[0], np.cos(x1) - 2.0 * np.sin(2.0 * x2)) < 1e-10


def test_divergence_needs_a_multiple_of_the_dimension(grid16: Grid) -> None:
    with pytest.raises(ComponentCountError):
        divergence(SpectralField.zeros(grid16, 3))


def test_heat_semigroup_decays_modes_exponentially(grid32: Grid) -> None:
    mode = cosine_mode(grid32, (1, 2))
    evolved = heat_semigroup(mode, 0.3, diffusivity=2.0)
    assert max_gap(evolved.values, math.exp(-5.0 * 0.6) * mode.values) < 1e-12
    assert heat_semigroup(mode, 0.0) is mode
    with pytest.raises(NegativeTimeError):
        heat_semigroup(mode, -1e-3)


def test_leray_projection_is_divergence_free_and_idempotent(grid32: Grid) -> None:
    field = trigonometric_field(grid32, components=2, seed=4)
    projected = leray_project(field)
    assert spectral_divergence_norm(projected) < 1e-10
    assert max_gap(leray_project(projected).values, projected.values) < 1e-12


def test_leray_and_riesz_parts_split_a_vector_field(grid32: Grid) -> None:
    field = trigonometric_field(grid32, components=2, seed=5)
    assert max_gap((leray_project(field) + riesz_riesz(field)).values, field.values) < 1e-12
    solenoidal = solenoidal_field(grid32, seed=6)
    assert riesz_riesz(solenoidal).max_abs() < 1e-12


def test_leray_projection_needs_a_vector_field(grid16: Grid) -> None:
    with pytest.raises(ComponentCountError):
        leray_project(SpectralField.zeros(grid16))
    with pytest.raises(ComponentCountError):
        riesz_riesz(SpectralField.zeros(grid16, 3))


def test_dealiasing_keeps_only_the_lower_two_thirds(grid32: Grid) -> None:
    low, high = cosine_mode(grid32, (3, 0)), cosine_mode(grid32, (12, 0))
    assert max_gap(dealias(low + high).values, low.values) < 1e-12


def test_field_arithmetic_requires_a_common_grid(grid16: Grid, grid32: Grid) -> None:
    with pytest.raises(GridMismatchError):
        SpectralField.zeros(grid16) + SpectralField.zeros(grid32)


def test_field_values_are_validated_and_frozen(grid16: Grid) -> None:
    with pytest.raises(ComponentCountError):
        SpectralField(grid=grid16, values=np.zeros((1, 8, 8)))
    with pytest.raises(ValueError):
        SpectralField(grid=grid16, values=np.full(grid16.shape, np.nan))
    field = SpectralField(grid=grid16, values=np.ones(grid16.shape))
    assert field.components == 1
    with pytest.raises(ValueError):
        field.values[0, 0, 0] = 2.0


def test_field_means_and_norms(grid32: Grid) -> None:
    field = cosine_mode(grid32, (1, 0)) + 0.5
    assert field.mean() == pytest.approx([0.5])
    assert field.without_mean().mean() == pytest.approx([0.0], abs=1e-14)
    assert SpectralField.constant(grid32, [3.0, 4.0]).norm(math.inf) == pytest.approx(5.0)
    assert SpectralField.constant(grid32, [1.0]).norm(2.0) == pytest.approx(2.0 * math.pi)


def test_snapshot_round_trip_keeps_values_and_time(tmp_path: Path, grid16: Grid) -> None:
    field = trigonometric_field(grid16, components=2, seed=1)
    path = write_snapshot(tmp_path / "u.elf", field, 0.125)
    restored, time = read_snapshot(path)
    assert restored.grid == grid16
    assert time == 0.125
    assert np.array_equal(restored.values, field.values)
    assert path.stat().st_size == HEADER_DTYPE.itemsize + 8 * 2 * 16 * 16


def test_snapshot_header_starts_with_the_magic(tmp_path: Path, grid16: Grid) -> None:
    path = write_snapshot(tmp_path / "a.elf", SpectralField.zeros(grid16), 0.0)
    assert path.read_bytes()[:8] == SNAPSHOT_MAGIC


def test_malformed_snapshots_are_rejected(tmp_path: Path, grid16: Grid) -> None:
    path = write_snapshot(tmp_path / "a.elf", SpectralField.zeros(grid16), 0.0)
    payload = path.read_bytes()
    truncated = tmp_path / "truncated.elf"
    truncated.write_bytes(payload[:-8])
    with pytest.raises(SnapshotFormatError):
        read_snapshot(truncated)
    foreign = tmp_path / "foreign.elf"
    foreign.write_bytes(b"NOTFIELD" + payload[8:])
    with pytest.raises(SnapshotFormatError):
        read_snapshot(foreign)
    short = tmp_path / "short.elf"
    short.write_bytes(payload[:10])
    with pytest.raises(SnapshotFormatError):
        read_snapshot(short)
    for dim, points in ((2, 12), (5, 16)):
        header = np.array([(SNAPSHOT_MAGIC, dim, points, 1.0, 0.0, 1)], dtype=HEADER_DTYPE)
        invalid = tmp_path / f"grid_{dim}_{points}.elf"
        invalid.write_bytes(header.tobytes() + np.zeros(points**2).tobytes())
        with pytest.raises(SnapshotFormatError, match="invalid grid"):
            read_snapshot(invalid)


def test_periodic_interpolation_of_a_smooth_field(grid32: Grid) -> None:
    field = cosine_mode(grid32, (1, 1))
    interpolator = PeriodicInterpolator.from_values(field.values, grid32)
    assert max_gap(interpolator(grid32.coordinates()), field.values) < 1e-10
    shifted = grid32.coordinates() + np.array([0.37, -0.21])[:, np.newaxis, np.newaxis]
    exact = np.cos(shifted[0] + shifted[1])
    assert max_gap(interpolator(shifted)[0], exact) < 5e-4
