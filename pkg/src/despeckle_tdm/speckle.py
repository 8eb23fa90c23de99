"""Seeded multiplicative Gamma speckle."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import FLOOR_INTENSITY, ImageGrid, as_array, check_same_shape


@dataclass(frozen=True)
class SpeckleParams:
    looks: int
    seed: int = 0

    def __post_init__(self):
        if int(self.looks) != self.looks or self.looks < 1:
            raise ValueError(f"look number must be a positive integer, got {self.looks}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")


def make_rng(seed: int) -> np.random.Generator:
    # Philox is counter-based; its stream for a given key is fixed across platforms.
    return np.random.Generator(np.random.Philox(key=seed))


def marsaglia_tsang(shape_param: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``size`` unit-scale Gamma(shape_param) variates.

    Squeeze-and-reject method of Marsaglia and Tsang (2000). Shapes below one
    are boosted: ``G(a) = G(a + 1) * U**(1/a)``.
    """
    if shape_param <= 0:
        raise ValueError("gamma shape must be positive")
    if shape_param < 1:
        boosted = marsaglia_tsang(shape_param + 1.0, size, rng)
        return boosted * rng.random(size) ** (1.0 / shape_param)

    d = shape_param - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)
    out = np.empty(size)
    filled = 0
    while filled < size:
        # Acceptance is above 95% for shape >= 1; oversample a little to finish in one pass.
        batch = int((size - filled) * 1.06) + 16
        x = rng.standard_normal(batch)
        u = rng.random(batch)
        v = 1.0 + c * x
        ok = v > 0
        x, u, v = x[ok], u[ok], v[ok] ** 3
        squeeze = u < 1.0 - 0.0331 * x**4
        with np.errstate(divide="ignore"):
            full = np.log(u) < 0.5 * x**2 + d * (1.0 - v + np.log(v))
        accepted = d * v[squeeze | full]
        take = min(accepted.size, size - filled)
        out[filled:filled + take] = accepted[:take]
        filled += take
    return out


def sample_speckle_field(params: SpeckleParams, width: int, height: int) -> ImageGrid:
    """I.i.d. Gamma(shape L, scale 1/L) field: unit mean, variance 1/L."""
    if width < 1 or height < 1:
        raise ValueError("speckle field dimensions must be positive")
    rng = make_rng(params.seed)
    draws = marsaglia_tsang(float(params.looks), width * height, rng) / params.looks
    # Underflow to exactly 0 is astronomically unlikely but would break positivity.
    draws = np.maximum(draws, np.finfo(np.float64).tiny)
    return ImageGrid(draws.reshape(height, width))


def apply_speckle(clean, noise, floor: float = FLOOR_INTENSITY) -> ImageGrid:
    clean_arr, noise_arr = as_array(clean), as_array(noise)
    check_same_shape(clean_arr, noise_arr)
    h = clean.h if isinstance(clean, ImageGrid) else 1.0
    return ImageGrid(np.maximum(clean_arr * noise_arr, floor), h)


def speckle(clean, looks: int, seed: int = 0) -> tuple[ImageGrid, ImageGrid]:
    """Speckled copy of ``clean`` plus the noise field that produced it."""
    arr = as_array(clean)
    noise = sample_speckle_field(SpeckleParams(looks, seed), arr.shape[1], arr.shape[0])
    return apply_speckle(clean, noise), noise
