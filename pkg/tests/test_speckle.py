import numpy as np
import pytest

from despeckle_tdm.grid import FLOOR_INTENSITY, ImageGrid
from despeckle_tdm.speckle import (SpeckleParams, apply_speckle, make_rng, marsaglia_tsang,
                                   sample_speckle_field)


def test_one_look_moments():
    field = sample_speckle_field(SpeckleParams(1, 7), 512, 512).data
    assert abs(field.mean() - 1) <= 0.01
    assert abs(field.var() - 1) <= 0.05


def test_many_looks_variance():
    field = sample_speckle_field(SpeckleParams(10000, 7), 512, 512).data
    assert abs(field.var() - 1e-4) <= 0.1e-4


def test_determinism():
    a = sample_speckle_field(SpeckleParams(3, 99), 40, 30).data
    b = sample_speckle_field(SpeckleParams(3, 99), 40, 30).data
    assert a.shape == (30, 40)
    assert a.tobytes() == b.tobytes()
    c = sample_speckle_field(SpeckleParams(3, 100), 40, 30).data
    assert not np.array_equal(a, c)


def test_positive():
    assert sample_speckle_field(SpeckleParams(1, 0), 64, 64).data.min() > 0


def test_zero_looks_rejected():
    with pytest.raises(ValueError):
        SpeckleParams(0, 1)


def test_fractional_shape_boost_matches_moments():
    x = marsaglia_tsang(0.5, 200_000, make_rng(3))
    assert abs(x.mean() - 0.5) < 0.01
    assert abs(x.var() - 0.5) < 0.02


def test_identity_noise():
    clean = np.linspace(0.1, 0.9, 12).reshape(3, 4)
    np.testing.assert_array_equal(apply_speckle(clean, np.ones((3, 4))).data, clean)


def test_clamp_boundary():
    out = apply_speckle(np.array([[2 * FLOOR_INTENSITY]]), np.array([[0.5]]))
    assert out.data[0, 0] == FLOOR_INTENSITY


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        apply_speckle(np.ones((2, 2)), np.ones((2, 3)))


def test_unbiased_over_seeds():
    # Monte Carlo over 10^4 seeds; Var[I * eta] = I^2 / L.
    clean = np.linspace(0.3, 0.9, 16).reshape(4, 4)
    looks, n_seeds = 3, 10_000
    acc = np.zeros_like(clean)
    for seed in range(n_seeds):
        acc += apply_speckle(ImageGrid(clean), sample_speckle_field(SpeckleParams(looks, seed), 4, 4)).data
    sigma = clean / np.sqrt(looks) / np.sqrt(n_seeds)
    assert np.all(np.abs(acc / n_seeds - clean) <= 3 * sigma)
