"""Gray-level indicator, variable exponents and the edge-stopping diffusivity.

The coefficient is

    g = eps + a(I_xi) / (1 + (|grad I_xi| / K) ** p)

with ``I_xi`` the Gaussian-smoothed image, ``a`` the gray-level indicator
``2|I_xi|^nu / (M^nu + |I_xi|^nu)`` and ``p`` either constant or one of three
image-dependent exponents.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .grid import as_array
from .smoothing import gaussian_convolve, gradient_magnitude, smoothed_gradient

EXPONENT_KINDS = ("constant", "avg_gray", "gray", "grad")

_DEGENERATE_MAX = 1e-12


@dataclass(frozen=True)
class DiffusivityConfig:
    """Parameters of the diffusion coefficient.

    ``p0`` is the constant exponent when ``exponent == "constant"`` and the
    base exponent otherwise. ``sigma`` (the gradient-exponent smoothing scale)
    falls back to ``xi`` when unset.
    """

    epsilon: float = 1e-4
    nu: float = 0.0
    K: float = 0.1
    exponent: str = "constant"
    p0: float = 2.0
    alpha: float = 2.0
    k: float = 1.0
    xi: float = 1.0
    sigma: Optional[float] = None

    def __post_init__(self):
        if self.exponent not in EXPONENT_KINDS:
            raise ValueError(f"exponent must be one of {EXPONENT_KINDS}, got {self.exponent!r}")
        if not self.epsilon >= 0:
            raise ValueError("epsilon must be non-negative")
        if not self.nu >= 0:
            raise ValueError("nu must be non-negative")
        if not self.K > 0:
            raise ValueError("K must be positive")
        if not 0 < self.p0 <= 4:
            raise ValueError("p0 must lie in (0, 4]")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not self.k > 0:
            raise ValueError("k must be positive")
        if not self.xi > 0:
            raise ValueError("xi must be positive")
        if self.sigma is not None and not self.sigma > 0:
            raise ValueError("sigma must be positive")

    @property
    def grad_sigma(self) -> float:
        return self.xi if self.sigma is None else self.sigma


@dataclass(frozen=True)
class DiffusivityField:
    g: np.ndarray
    p: np.ndarray
    a: np.ndarray


def gray_indicator(img_xi, nu: float, m_xi: float) -> np.ndarray:
    """``2|I|^nu / (M^nu + |I|^nu)``; identically 1 when ``M`` is (numerically) zero."""
    if nu < 0:
        raise ValueError("nu must be non-negative")
    if m_xi < 0:
        raise ValueError("maximum must be non-negative")
    arr = np.abs(as_array(img_xi))
    if m_xi < _DEGENERATE_MAX:
        return np.ones_like(arr)
    # Work on I/M so the result is scale free and never overflows.
    r = np.power(arr / m_xi, nu)
    return 2.0 * r / (1.0 + r)


def exponent_field(img, cfg: DiffusivityConfig, h: float = 1.0) -> np.ndarray:
    arr = as_array(img)
    if cfg.exponent == "constant":
        return np.full(arr.shape, float(cfg.p0))
    if cfg.exponent == "avg_gray":
        smooth = gaussian_convolve(arr, cfg.xi)
        ind = gray_indicator(smooth, cfg.alpha, float(np.abs(smooth).max()))
        return np.full(arr.shape, cfg.p0 - float(ind.mean()))
    if cfg.exponent == "gray":
        return cfg.p0 - gray_indicator(arr, cfg.alpha, float(np.abs(arr).max()))
    gx, gy = smoothed_gradient(arr, cfg.grad_sigma, h)
    return cfg.p0 - 2.0 / (1.0 + cfg.k * (gx * gx + gy * gy))


def edge_stop(grad_mag: np.ndarray, K: float, p: np.ndarray) -> np.ndarray:
    """``1 / (1 + (|grad| / K) ** p)`` with ``0 ** 0 = 1``.

    A negative exponent (gradient exponent with ``p0 < 2`` on a flat patch)
    sends ``0 ** p`` to infinity and the factor to 0.
    """
    # np.power already returns 1 for 0 ** 0.
    with np.errstate(divide="ignore"):
        return 1.0 / (1.0 + np.power(grad_mag / K, p))


def diffusivity_field(img, cfg: DiffusivityConfig, h: float = 1.0) -> DiffusivityField:
    arr = as_array(img)
    smooth = gaussian_convolve(arr, cfg.xi)
    a = gray_indicator(smooth, cfg.nu, float(np.abs(smooth).max()))
    p = exponent_field(arr, cfg, h)
    gx, gy = smoothed_gradient(arr, cfg.xi, h)
    g = cfg.epsilon + a * edge_stop(gradient_magnitude(gx, gy), cfg.K, p)
    return DiffusivityField(g=g, p=p, a=a)


def diffusivity_constant_p(img, nu: float, K: float, p: float, epsilon: float = 0.0,
                           xi: float = 1.0, h: float = 1.0) -> DiffusivityField:
    """Constant-exponent coefficient; ``epsilon`` defaults to 0 to match the plain form."""
    cfg = DiffusivityConfig(epsilon=epsilon, nu=nu, K=K, exponent="constant", p0=p, xi=xi)
    return diffusivity_field(img, cfg, h)
