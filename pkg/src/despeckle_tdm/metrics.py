"""Restoration quality and speckle-bias measures."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy import ndimage
from skimage.filters import threshold_otsu

from .grid import FLOOR_INTENSITY, as_array, check_same_shape

INF = math.inf


def mse(a, b) -> float:
    a, b = as_array(a), as_array(b)
    check_same_shape(a, b)
    return float(np.mean((a - b) ** 2))


def psnr(reference, test) -> float:
    """``10 log10(max(reference)^2 / MSE)``; ``inf`` for identical images."""
    err = mse(reference, test)
    if err == 0.0:
        return INF
    peak = float(as_array(reference).max())
    return 10.0 * math.log10(peak * peak / err)


# ---------------------------------------------------------------------------
# SSIM
# ---------------------------------------------------------------------------

SSIM_WIN = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


def ssim_window(size: int = SSIM_WIN, sigma: float = SSIM_SIGMA) -> np.ndarray:
    if size < 1 or size % 2 == 0:
        raise ValueError("SSIM window size must be odd and positive")
    r = size // 2
    t = np.arange(-r, r + 1, dtype=np.float64)
    w1 = np.exp(-0.5 * (t / sigma) ** 2)
    w = np.outer(w1, w1)
    return w / w.sum()


def ssim_map(reference, test, data_range: Optional[float] = None,
             win_size: int = SSIM_WIN, sigma: float = SSIM_SIGMA) -> np.ndarray:
    """Local SSIM for every full window position (no padding)."""
    x, y = as_array(reference), as_array(test)
    check_same_shape(x, y)
    if min(x.shape) < win_size:
        raise ValueError(f"image {x.shape} is smaller than the {win_size}x{win_size} SSIM window")
    if data_range is None:
        data_range = float(x.max())
    w = ssim_window(win_size, sigma)
    c1 = (SSIM_K1 * data_range) ** 2
    c2 = (SSIM_K2 * data_range) ** 2

    def local(a):
        return _valid_correlate(a, w)

    mu_x, mu_y = local(x), local(y)
    var_x = local(x * x) - mu_x * mu_x
    var_y = local(y * y) - mu_y * mu_y
    cov = local(x * y) - mu_x * mu_y
    num = (2 * mu_x * mu_y + c1) * (2 * cov + c2)
    den = (mu_x ** 2 + mu_y ** 2 + c1) * (var_x + var_y + c2)
    return num / den


def _valid_correlate(a: np.ndarray, w: np.ndarray) -> np.ndarray:
    windows = np.lib.stride_tricks.sliding_window_view(a, w.shape)
    return np.einsum("ijkl,kl->ij", windows, w)


def mssim(reference, test, data_range: Optional[float] = None,
          win_size: int = SSIM_WIN, sigma: float = SSIM_SIGMA) -> float:
    return float(ssim_map(reference, test, data_range, win_size, sigma).mean())


# ---------------------------------------------------------------------------
# Ratio image and bias measures
# ---------------------------------------------------------------------------

def ratio_image(noisy, restored, floor: float = FLOOR_INTENSITY) -> np.ndarray:
    n, r = as_array(noisy), as_array(restored)
    check_same_shape(n, r)
    return n / np.maximum(r, floor)


def mor_vor(ratio) -> tuple[float, float]:
    r = as_array(ratio)
    return float(r.mean()), float(r.var())


def despeckling_gain(clean, noisy, restored) -> float:
    """MSE reduction versus the clean image, in dB."""
    err_noisy = mse(clean, noisy)
    err_restored = mse(clean, restored)
    if err_restored == 0.0:
        return INF
    if err_noisy == err_restored:
        return 0.0
    if err_noisy == 0.0:
        return -INF
    return 10.0 * math.log10(err_noisy / err_restored)


def enl(region) -> float:
    """Equivalent number of looks, ``mean^2 / variance``."""
    r = np.asarray(region, dtype=np.float64).ravel()
    if r.size < 2:
        raise ValueError("ENL needs more than one pixel")
    var = r.var()
    if var == 0.0:
        return INF
    return float(r.mean() ** 2 / var)


def enl_trimmed(region, trim: float = 0.05) -> float:
    """ENL over the sample with ``trim`` of the values cut from each tail."""
    r = np.sort(np.asarray(region, dtype=np.float64).ravel())
    cut = int(math.floor(trim * r.size))
    if cut:
        r = r[cut:r.size - cut]
    return enl(r)


def speckle_index(img, window: int = 3, floor: float = FLOOR_INTENSITY,
                  return_flagged: bool = False):
    """Mean local coefficient of variation over ``window x window`` neighbourhoods.

    Neighbourhoods replicate the border. Pixels whose local mean falls below
    ``floor`` contribute 0; with ``return_flagged`` their count is returned too.
    """
    if window < 3 or window % 2 == 0:
        raise ValueError("speckle index window must be odd and >= 3")
    arr = as_array(img)
    r = window // 2
    windows = np.lib.stride_tricks.sliding_window_view(np.pad(arr, r, mode="edge"), (window, window))
    mean = windows.mean(axis=(-2, -1))
    std = windows.std(axis=(-2, -1))
    # Flat windows are exactly zero; the rounded mean would leave ~1e-17 behind.
    std[np.ptp(windows, axis=(-2, -1)) == 0] = 0.0
    bad = mean < floor
    cv = np.where(bad, 0.0, std / np.where(bad, 1.0, mean))
    si = float(cv.mean())
    if return_flagged:
        return si, int(bad.sum())
    return si


# ---------------------------------------------------------------------------
# Edge localization
# ---------------------------------------------------------------------------

FOM_SCALE = 1.0 / 9.0


def edge_map(img) -> np.ndarray:
    """Sobel gradient magnitude thresholded at its Otsu level."""
    arr = as_array(img)
    mag = np.hypot(ndimage.sobel(arr, axis=1, mode="nearest"),
                   ndimage.sobel(arr, axis=0, mode="nearest"))
    if np.ptp(mag) == 0:
        return np.zeros(arr.shape, dtype=bool)
    return mag > threshold_otsu(mag)


def figure_of_merit(edges_ref, edges_test, a: float = FOM_SCALE) -> float:
    """Pratt's figure of merit between two binary edge maps."""
    ref = np.asarray(edges_ref, dtype=bool)
    test = np.asarray(edges_test, dtype=bool)
    check_same_shape(ref, test)
    n_ref, n_test = int(ref.sum()), int(test.sum())
    if n_ref == 0 or n_test == 0:
        raise ValueError("figure of merit needs at least one edge pixel in each map")
    dist = ndimage.distance_transform_edt(~ref)
    d = dist[test]
    return float(np.sum(1.0 / (1.0 + a * d * d)) / max(n_ref, n_test))


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------

REPORT_FIELDS = ("psnr", "mssim", "mor", "vor", "vor_norm", "dg", "enl", "enl_star", "si", "fom")


@dataclass
class MetricsReport:
    psnr: float
    mssim: float
    mor: float
    vor: float
    vor_norm: float
    dg: float
    enl: float
    enl_star: float
    si: float
    fom: Optional[float] = None
    si_flagged: int = 0

    def as_row(self) -> dict:
        d = asdict(self)
        return {k: d[k] for k in REPORT_FIELDS}


def homogeneous_mask(clean) -> np.ndarray:
    """Pixels carrying the most frequent clean value; the whole image if none repeats."""
    arr = as_array(clean)
    values, counts = np.unique(arr, return_counts=True)
    if counts.max() < 2:
        return np.ones(arr.shape, dtype=bool)
    return arr == values[np.argmax(counts)]


def evaluate(clean, noisy, restored, looks: Optional[int] = None, si_window: int = 3,
             with_fom: bool = True) -> MetricsReport:
    """Every measure for one restored image.

    ENL and ENL* are taken over the largest constant region of ``clean``.
    ``vor_norm`` is ``VoR * L`` (1.0 means the ratio image carries all of the
    speckle); it is NaN when ``looks`` is unknown.
    """
    clean, noisy, restored = as_array(clean), as_array(noisy), as_array(restored)
    check_same_shape(clean, noisy, restored)
    mor, vor = mor_vor(ratio_image(noisy, restored))
    region = restored[homogeneous_mask(clean)]
    si, flagged = speckle_index(restored, si_window, return_flagged=True)
    fom = None
    if with_fom:
        ref_edges, test_edges = edge_map(clean), edge_map(restored)
        if ref_edges.any() and test_edges.any():
            fom = figure_of_merit(ref_edges, test_edges)
    return MetricsReport(
        psnr=psnr(clean, restored),
        mssim=mssim(clean, restored) if min(clean.shape) >= SSIM_WIN else math.nan,
        mor=mor,
        vor=vor,
        vor_norm=vor * looks if looks else math.nan,
        dg=despeckling_gain(clean, noisy, restored),
        enl=enl(region),
        enl_star=enl_trimmed(region),
        si=si,
        fom=fom,
        si_flagged=flagged,
    )
