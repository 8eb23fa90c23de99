"""Synthetic clean test images."""
from __future__ import annotations

import numpy as np

from .grid import FLOOR_INTENSITY, ImageGrid, load_pgm

PHANTOMS = ("circle", "mosaic", "ramp")
MOSAIC_LEVELS = (0.2, 0.4, 0.6, 0.8)
MIN_SIZE = 32


def circle(width: int, height: int) -> np.ndarray:
    """Background 0.2 with a centred disk of 0.8, radius ``0.3 * min(width, height)``."""
    y, x = np.mgrid[0:height, 0:width]
    cx, cy = (width - 1) / 2.0, (height - 1) / 2.0
    radius = 0.3 * min(width, height)
    inside = (x - cx) ** 2 + (y - cy) ** 2 <= radius ** 2
    return np.where(inside, 0.8, 0.2)


def mosaic(width: int, height: int) -> np.ndarray:
    """4 x 4 blocks; horizontal neighbours differ by one level, vertical by two."""
    bx = np.arange(width) * 4 // width
    by = np.arange(height) * 4 // height
    levels = np.asarray(MOSAIC_LEVELS)
    return levels[(bx[None, :] + 2 * by[:, None]) % 4]


def ramp(width: int, height: int) -> np.ndarray:
    """Horizontal linear ramp from the intensity floor to 1, constant down each column."""
    row = np.linspace(FLOOR_INTENSITY, 1.0, width)
    return np.tile(row, (height, 1))


def make_phantom(kind: str, width: int, height: int) -> ImageGrid:
    """Build a phantom by name; ``file:<path>`` loads a PGM instead."""
    if kind.startswith("file:"):
        return load_pgm(kind[len("file:"):])
    if kind not in PHANTOMS:
        raise ValueError(f"unknown phantom {kind!r}; expected one of {PHANTOMS} or file:<path>")
    if width < MIN_SIZE or height < MIN_SIZE:
        raise ValueError(f"phantom dimensions must be at least {MIN_SIZE}, got {width}x{height}")
    builder = {"circle": circle, "mosaic": mosaic, "ramp": ramp}[kind]
    return ImageGrid(builder(width, height))
