import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from despeckle_tdm.diffusivity import (DiffusivityConfig, diffusivity_constant_p, diffusivity_field,
                                       edge_stop, exponent_field, gray_indicator)
from despeckle_tdm.smoothing import gaussian_convolve, gradient_magnitude, smoothed_gradient

KINDS = [
    dict(exponent="constant", p0=1.5),
    dict(exponent="avg_gray", p0=2.2, alpha=2.0),
    dict(exponent="gray", p0=2.6, alpha=2.0),
    dict(exponent="grad", p0=1.9, k=2.0),
]


def test_indicator_at_max_and_zero():
    img = np.array([[0.0, 0.25, 0.5]])
    a = gray_indicator(img, 1.0, 0.5)
    assert a[0, 2] == 1.0
    assert a[0, 0] == 0.0


def test_indicator_nu_zero_is_one():
    img = np.array([[0.0, 0.1, 0.7]])
    np.testing.assert_array_equal(gray_indicator(img, 0.0, 0.7), 1.0)


def test_indicator_degenerate_max():
    np.testing.assert_array_equal(gray_indicator(np.zeros((2, 2)), 1.0, 0.0), 1.0)


def test_indicator_rejects_negative_nu():
    with pytest.raises(ValueError):
        gray_indicator(np.ones((2, 2)), -1.0, 1.0)


def test_indicator_third_of_max():
    assert gray_indicator(np.array([[1 / 3]]), 1.0, 1.0)[0, 0] == pytest.approx(0.5, abs=1e-15)


@given(arrays(np.float64, (5, 5), elements=st.just(0.0) | st.floats(1e-6, 2)), st.floats(0, 4),
       st.floats(0.01, 100))
def test_indicator_scale_invariant(img, nu, c):
    m = float(np.abs(img).max())
    np.testing.assert_allclose(gray_indicator(c * img, nu, c * m), gray_indicator(img, nu, m),
                               atol=1e-12)


def test_avg_gray_on_constant():
    p = exponent_field(np.full((8, 8), 0.6), DiffusivityConfig(exponent="avg_gray", p0=2.2))
    np.testing.assert_allclose(p, 1.2, atol=1e-15)


def test_gray_exponent_extremes():
    img = np.array([[0.0, 0.8], [0.4, 0.8]])
    p = exponent_field(img, DiffusivityConfig(exponent="gray", p0=2.6, alpha=1.0))
    assert p[0, 1] == pytest.approx(1.6)
    assert p[0, 0] == pytest.approx(2.6)


def test_grad_exponent_flat_and_unit():
    flat = exponent_field(np.full((8, 8), 0.3), DiffusivityConfig(exponent="grad", p0=2.0, k=2.0))
    np.testing.assert_allclose(flat, 0.0, atol=1e-15)
    ramp = np.tile(np.arange(24) * 0.05, (24, 1))
    # |grad| = 0.05 in the interior, so k = 1 / 0.05^2 puts k|grad|^2 at 1.
    p = exponent_field(ramp, DiffusivityConfig(exponent="grad", p0=2.0, k=400.0))
    np.testing.assert_allclose(p[:, 5:-5], 1.0, atol=1e-10)


def test_zero_gradient_gives_eps_plus_a():
    img = np.full((10, 10), 0.4)
    f = diffusivity_field(img, DiffusivityConfig(nu=1.0, epsilon=1e-3))
    np.testing.assert_allclose(f.g, 1e-3 + f.a, atol=1e-15)


@pytest.mark.parametrize("kind", KINDS[:3] + [dict(exponent="grad", p0=2.5, k=2.0)])
def test_constant_image_nu_zero(kind):
    f = diffusivity_field(np.full((9, 9), 0.5), DiffusivityConfig(nu=0.0, **kind))
    np.testing.assert_allclose(f.g, 1 + 1e-4, atol=1e-15)


@pytest.mark.parametrize("p0, factor", [(2.0, 0.5), (1.9, 0.0)])
def test_constant_image_grad_exponent_not_positive(p0, factor):
    # Flat patch: p = p0 - 2, so 0**0 = 1 halves g and 0**(-0.1) = inf zeroes it.
    f = diffusivity_field(np.full((9, 9), 0.5), DiffusivityConfig(nu=0.0, exponent="grad", p0=p0))
    np.testing.assert_allclose(f.g, 1e-4 + factor, atol=1e-15)


def test_edge_stop_monotone_in_gradient():
    K = 0.1
    grads = np.array([0.0, K, 2 * K, 4 * K])
    for p in (0.5, 1.0, 1.5, 2.2, 3.0):
        for a in (0.2, 1.0):
            g = 1e-4 + a * edge_stop(grads, K, np.full(4, p))
            assert np.all(np.diff(g) < 0)
    # p = 0 is flat at 1/2, so non-increasing holds with equality.
    np.testing.assert_array_equal(edge_stop(grads, K, np.zeros(4)), 0.5)


def test_zero_to_zero_is_one():
    assert edge_stop(np.array([0.0]), 0.1, np.array([0.0]))[0] == 0.5


def test_catte_reduction(rng):
    img = 0.2 + rng.random((16, 16))
    f = diffusivity_constant_p(img, nu=0.0, K=0.1, p=2.0)
    gx, gy = smoothed_gradient(img, 1.0)
    expected = 1 / (1 + (gradient_magnitude(gx, gy) / 0.1) ** 2)
    np.testing.assert_allclose(f.g, expected, rtol=1e-14)


def test_gradient_at_K_halves():
    assert edge_stop(np.array([0.1]), 0.1, np.array([1.7]))[0] == 0.5


def test_uses_smoothed_iterate_for_indicator(rng):
    img = 0.1 + rng.random((12, 12))
    f = diffusivity_field(img, DiffusivityConfig(nu=2.0))
    smooth = gaussian_convolve(img, 1.0)
    np.testing.assert_allclose(f.a, gray_indicator(smooth, 2.0, smooth.max()))


@pytest.mark.parametrize("bad", [dict(epsilon=-1), dict(K=0), dict(p0=5), dict(alpha=0),
                                 dict(k=0), dict(exponent="nope"), dict(xi=0), dict(nu=-1)])
def test_config_validation(bad):
    with pytest.raises(ValueError):
        DiffusivityConfig(**bad)


@given(arrays(np.float64, (10, 10), elements=st.floats(1 / 255, 1.0)),
       st.sampled_from(range(len(KINDS))), st.floats(0, 3), st.floats(0.01, 1))
def test_bounds_property(img, kind_idx, nu, K):
    cfg = DiffusivityConfig(nu=nu, K=K, **KINDS[kind_idx])
    f = diffusivity_field(img, cfg)
    assert np.all(f.g >= cfg.epsilon) and np.all(f.g <= 1 + cfg.epsilon)
    assert np.all(f.a >= 0) and np.all(f.a <= 1)
    assert np.all(f.p >= cfg.p0 - 2) and np.all(f.p <= cfg.p0)
    if cfg.exponent == "avg_gray":
        assert np.ptp(f.p) == 0
