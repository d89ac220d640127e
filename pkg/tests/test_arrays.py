import math

import numpy as np
import pytest

from squintsim.arrays import (
    ArrayGeometry,
    Direction,
    FrequencyGrid,
    array_gain_closed_form,
    beam_pattern_gain,
    bsr_closed_form,
    bsr_numerical,
    dirichlet_kernel,
    normalized_array_gain,
    optimal_upa_shape,
    steering_vector,
)

FC = 300e9


def random_direction(rng) -> Direction:
    return Direction(rng.uniform(-np.pi, np.pi), rng.uniform(-np.pi / 2, np.pi / 2))


# ---------------------------------------------------------------------------
# geometry / direction / grid types
# ---------------------------------------------------------------------------

def test_geometry_validation():
    with pytest.raises(ValueError):
        ArrayGeometry(0, 4)
    with pytest.raises(ValueError):
        ArrayGeometry(4, 4, spacing_h=0.0)
    geom = ArrayGeometry(8, 4, 0.5, 0.25)
    assert geom.size == 32
    assert geom.aperture_h == 4.0
    assert geom.aperture_v == 1.0


def test_direction_spatial_coordinates_bounded():
    rng = np.random.default_rng(0)
    for _ in range(200):
        d = Direction(rng.uniform(-10, 10), rng.uniform(-10, 10))
        assert -1.0 <= d.spatial_h <= 1.0
        assert -1.0 <= d.spatial_v <= 1.0


def test_direction_from_spatial_roundtrip():
    rng = np.random.default_rng(1)
    for _ in range(100):
        d = random_direction(rng)
        back = Direction.from_spatial(d.spatial_h, d.spatial_v)
        assert back.spatial_h == pytest.approx(d.spatial_h, abs=1e-12)
        assert back.spatial_v == pytest.approx(d.spatial_v, abs=1e-12)
    with pytest.raises(ValueError):
        Direction.from_spatial(0.9, 0.9)


def test_frequency_grid_deviations():
    grid = FrequencyGrid(FC, 30e9, 128)
    dev = grid.deviations
    # antisymmetric around the center of the band
    assert np.allclose(dev + dev[::-1], 0.0, atol=1e-15)
    assert np.abs(dev).max() < grid.fractional_bandwidth / 2
    odd = FrequencyGrid(FC, 30e9, 129)
    assert odd.deviations[64] == 0.0
    assert odd.central_index == 65
    assert FrequencyGrid(FC, 30e9, 128).central_index == 64


def test_frequency_grid_validation():
    with pytest.raises(ValueError):
        FrequencyGrid(FC, 0.0, 8)
    with pytest.raises(ValueError):
        FrequencyGrid(FC, FC, 8)
    with pytest.raises(ValueError):
        FrequencyGrid(FC, 1e9, 0)


# ---------------------------------------------------------------------------
# steering vectors
# ---------------------------------------------------------------------------

def test_steering_single_element_is_one():
    geom = ArrayGeometry(1, 1, 0.3, 0.7)
    a = steering_vector(geom, Direction(1.0, -0.4), 1.07 * FC, FC)
    assert a.shape == (1,)
    assert a[0] == pytest.approx(1.0, abs=1e-15)


def test_steering_two_element_endfire():
    # spatial_h = 1 needs azimuth = elevation = pi/2
    geom = ArrayGeometry(2, 1, 0.5, 0.5)
    a = steering_vector(geom, Direction(np.pi / 2, np.pi / 2), FC, FC)
    expected = np.array([1.0, np.exp(1j * np.pi)]) / np.sqrt(2)
    np.testing.assert_allclose(a, expected, atol=1e-12)


def test_steering_matches_direct_indexing_oracle():
    # independent construction: one phase term per element over the flat index
    geom = ArrayGeometry(4, 2, 0.5, 0.5)
    rng = np.random.default_rng(7)
    for _ in range(20):
        d = random_direction(rng)
        freq = 1.05 * FC
        ratio = freq / FC
        oracle = np.empty(geom.size, dtype=complex)
        for m in range(geom.n_h):
            for n in range(geom.n_v):
                phase = (
                    geom.spacing_h * m * ratio * d.spatial_h
                    + geom.spacing_v * n * ratio * d.spatial_v
                )
                oracle[m * geom.n_v + n] = np.exp(2j * np.pi * phase)
        oracle /= np.sqrt(geom.size)
        np.testing.assert_allclose(steering_vector(geom, d, freq, FC), oracle, atol=1e-12)


def test_steering_unit_norm():
    rng = np.random.default_rng(11)
    for _ in range(50):
        geom = ArrayGeometry(int(rng.integers(1, 9)), int(rng.integers(1, 9)),
                             rng.uniform(0.1, 1.0), rng.uniform(0.1, 1.0))
        a = steering_vector(geom, random_direction(rng), FC * rng.uniform(0.9, 1.1), FC)
        assert np.linalg.norm(a) == pytest.approx(1.0, abs=1e-12)


def test_steering_rejects_nonpositive_frequency():
    geom = ArrayGeometry(2, 2)
    with pytest.raises(ValueError):
        steering_vector(geom, Direction(0.1, 0.1), 0.0, FC)
    with pytest.raises(ValueError):
        steering_vector(geom, Direction(0.1, 0.1), FC, -FC)


def test_kronecker_factorization_of_inner_products():
    # |a^H(fc) a(fk)| equals the product of the per-axis inner products
    rng = np.random.default_rng(3)
    for _ in range(50):
        n_h, n_v = int(rng.integers(1, 12)), int(rng.integers(1, 12))
        geom = ArrayGeometry(n_h, n_v, 0.5, 0.5)
        d = random_direction(rng)
        freq = FC * (1.0 + rng.uniform(-0.05, 0.05))
        whole = abs(
            np.vdot(steering_vector(geom, d, FC, FC), steering_vector(geom, d, freq, FC))
        )
        horiz = ArrayGeometry(n_h, 1, 0.5, 0.5)
        vert = ArrayGeometry(1, n_v, 0.5, 0.5)
        part_h = abs(
            np.vdot(steering_vector(horiz, d, FC, FC), steering_vector(horiz, d, freq, FC))
        )
        part_v = abs(
            np.vdot(steering_vector(vert, d, FC, FC), steering_vector(vert, d, freq, FC))
        )
        assert whole == pytest.approx(part_h * part_v, abs=1e-10)


def test_geometric_series_identity():
    # the per-axis inner product magnitude is a Dirichlet kernel
    rng = np.random.default_rng(4)
    for _ in range(50):
        n = int(rng.integers(1, 65))
        geom = ArrayGeometry(n, 1, 0.5, 0.5)
        d = random_direction(rng)
        xi = rng.uniform(-0.05, 0.05)
        inner = abs(
            np.vdot(steering_vector(geom, d, FC, FC), steering_vector(geom, d, FC * (1 + xi), FC))
        )
        kernel = abs(dirichlet_kernel(n, 0.5 * xi * d.spatial_h))
        assert inner == pytest.approx(kernel, abs=1e-10)


# ---------------------------------------------------------------------------
# array gain
# ---------------------------------------------------------------------------

def test_matched_beam_gain_is_one_at_carrier():
    geom = ArrayGeometry(8, 4)
    d = Direction(0.9, 0.3)
    w = steering_vector(geom, d, FC, FC)
    assert normalized_array_gain(w, d, FC, geom, FC) == pytest.approx(1.0, abs=1e-12)


def test_gain_drops_for_separated_mainlobes():
    # large array, wide band: the squinted beam misses the matched direction
    geom = ArrayGeometry(160, 80)
    d = Direction.from_spatial(0.5, 0.5)
    w = steering_vector(geom, d, FC, FC)
    assert normalized_array_gain(w, d, FC + 15e9, geom, FC) < 0.05


def test_gain_zero_for_orthogonal_weights():
    geom = ArrayGeometry(4, 4)
    d = Direction(0.2, 0.5)
    a = steering_vector(geom, d, FC, FC)
    rng = np.random.default_rng(5)
    w = rng.standard_normal(16) + 1j * rng.standard_normal(16)
    w -= np.vdot(a, w) * a  # project out the steering direction
    w /= np.linalg.norm(w)
    assert normalized_array_gain(w, d, FC, geom, FC) == pytest.approx(0.0, abs=1e-12)


def test_gain_rejects_dimension_mismatch():
    geom = ArrayGeometry(4, 4)
    with pytest.raises(ValueError):
        normalized_array_gain(np.ones(15), Direction(0.1, 0.1), FC, geom, FC)


def test_dirichlet_kernel_values():
    for n in (1, 2, 5, 33):
        assert dirichlet_kernel(n, 0.0) == 1.0
    assert dirichlet_kernel(2, 0.5) == pytest.approx(0.0, abs=1e-15)
    for n in range(2, 10):
        assert dirichlet_kernel(n, 1.0 / n) == pytest.approx(0.0, abs=1e-12)
    # limit values at integer arguments alternate with the parity of (n-1)*m
    assert dirichlet_kernel(3, 1.0) == 1.0
    assert dirichlet_kernel(2, 1.0) == -1.0
    assert dirichlet_kernel(2, -1.0) == -1.0
    with pytest.raises(ValueError):
        dirichlet_kernel(0, 0.1)


def test_dirichlet_kernel_vectorized_and_even_magnitude():
    x = np.linspace(-2, 2, 401)
    values = dirichlet_kernel(16, x)
    assert values.shape == x.shape
    np.testing.assert_allclose(np.abs(values), np.abs(values[::-1]), atol=1e-12)


def test_closed_form_gain_at_zero_deviation():
    assert array_gain_closed_form(ArrayGeometry(16, 16), Direction(0.4, 1.0), 0.0) == 1.0


def test_closed_form_gain_is_product_of_kernels():
    geom = ArrayGeometry(160, 80)
    d = Direction.from_spatial(0.5, 0.5)
    xi = 0.05
    expected = abs(dirichlet_kernel(160, 0.5 * xi * d.spatial_h)) * abs(
        dirichlet_kernel(80, 0.5 * xi * d.spatial_v)
    )
    assert array_gain_closed_form(geom, d, xi) == pytest.approx(expected, rel=1e-12)


def test_closed_form_gain_matches_inner_product():
    rng = np.random.default_rng(6)
    for _ in range(200):
        geom = ArrayGeometry(int(rng.integers(1, 33)), int(rng.integers(1, 33)))
        d = random_direction(rng)
        xi = rng.uniform(-0.05, 0.05)
        w = steering_vector(geom, d, FC, FC)
        inner = normalized_array_gain(w, d, FC * (1 + xi), geom, FC)
        assert array_gain_closed_form(geom, d, xi) == pytest.approx(inner, abs=1e-9)


def test_closed_form_gain_even_in_deviation():
    rng = np.random.default_rng(8)
    for _ in range(50):
        geom = ArrayGeometry(int(rng.integers(1, 33)), int(rng.integers(1, 33)))
        d = random_direction(rng)
        xi = rng.uniform(0.0, 0.05)
        assert array_gain_closed_form(geom, d, xi) == pytest.approx(
            array_gain_closed_form(geom, d, -xi), abs=1e-12
        )


def test_ula_gain_reduces_to_single_kernel():
    geom = ArrayGeometry(32, 1)
    d = Direction(0.7, 0.9)
    xi = 0.03
    assert array_gain_closed_form(geom, d, xi) == pytest.approx(
        abs(dirichlet_kernel(32, 0.5 * xi * d.spatial_h)), rel=1e-12
    )


def test_beam_pattern_gain_matches_steering_inner_product():
    geom = ArrayGeometry(12, 6)
    rng = np.random.default_rng(9)
    beam = random_direction(rng)
    w = steering_vector(geom, beam, FC, FC)
    for _ in range(30):
        target = random_direction(rng)
        ratio = 1.0 + rng.uniform(-0.05, 0.05)
        gain = beam_pattern_gain(
            geom, beam.spatial_h, beam.spatial_v, target.spatial_h, target.spatial_v, ratio
        )
        inner = normalized_array_gain(w, target, ratio * FC, geom, FC)
        assert gain == pytest.approx(inner, abs=1e-10)


# ---------------------------------------------------------------------------
# beam squint ratio
# ---------------------------------------------------------------------------

def test_bsr_closed_form_golden_values():
    assert bsr_closed_form(ArrayGeometry(160, 80), 0.1) == pytest.approx(1.0, abs=1e-12)
    assert bsr_closed_form(ArrayGeometry(16, 16), 0.1) == pytest.approx(0.1, abs=1e-12)
    assert bsr_closed_form(ArrayGeometry(16, 1), 0.1) == pytest.approx(0.1, abs=1e-12)
    b = 0.07
    assert bsr_closed_form(ArrayGeometry(1, 1), b) == pytest.approx(b / 16, abs=1e-15)
    with pytest.raises(ValueError):
        bsr_closed_form(ArrayGeometry(4, 4), -0.1)


def test_bsr_scaling_laws():
    geom = ArrayGeometry(32, 8)
    base = bsr_closed_form(geom, 0.1)
    assert bsr_closed_form(geom, 0.2) == pytest.approx(2 * base, rel=1e-12)
    halved = ArrayGeometry(32, 8, 0.25, 0.25)
    assert bsr_closed_form(halved, 0.1) == pytest.approx(base / 2, rel=1e-12)
    doubled_aperture = ArrayGeometry(64, 8)
    assert bsr_closed_form(doubled_aperture, 0.1) == pytest.approx(2 * base, rel=1e-12)


def test_bsr_square_vs_ula_ratio():
    for n in (16, 64, 256, 1024):
        root = int(math.isqrt(n))
        square = bsr_closed_form(ArrayGeometry(root, root), 0.1)
        ula = bsr_closed_form(ArrayGeometry(n, 1), 0.1)
        assert square / ula == pytest.approx(1.0 / root, abs=1e-12)


def test_bsr_numerical_single_subcarrier_is_zero():
    assert bsr_numerical(ArrayGeometry(16, 16), FrequencyGrid(FC, 30e9, 1)) == 0.0


@pytest.mark.parametrize(
    "n_h,n_v,bandwidth", [(160, 80, 30e9), (16, 16, 30e9), (8, 32, 60e9)]
)
def test_bsr_numerical_converges_to_closed_form(n_h, n_v, bandwidth):
    geom = ArrayGeometry(n_h, n_v)
    grid = FrequencyGrid(FC, bandwidth, 128)
    closed = bsr_closed_form(geom, grid.fractional_bandwidth)
    assert bsr_numerical(geom, grid) == pytest.approx(closed, rel=0.01)


# ---------------------------------------------------------------------------
# optimal shape
# ---------------------------------------------------------------------------

def test_optimal_shape_golden_cases():
    assert optimal_upa_shape(256) == (16, 16)
    assert optimal_upa_shape(1) == (1, 1)
    assert optimal_upa_shape(12) == (4, 3)
    with pytest.raises(ValueError):
        optimal_upa_shape(0)


def test_optimal_shape_minimizes_bsr_exhaustively():
    rng = np.random.default_rng(10)
    for n in rng.integers(1, 400, size=40):
        n = int(n)
        shape = optimal_upa_shape(n)
        assert shape[0] * shape[1] == n
        assert shape[0] >= shape[1]
        best = min(
            bsr_closed_form(ArrayGeometry(d, n // d), 0.1)
            for d in range(1, n + 1)
            if n % d == 0
        )
        assert bsr_closed_form(ArrayGeometry(*shape), 0.1) == pytest.approx(best, rel=1e-12)
