"""Image grid type, ghost-cell access and PGM I/O.

Pixel ``(i, j)`` addresses column ``i`` (x, along the width) and row ``j``
(y, along the height); ``data`` is stored row-major with shape
``(height, width)`` so ``data[j, i]`` is that pixel.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

FLOOR_INTENSITY = 1.0 / 255.0

_SUPPORTED_MAXVAL = (255, 65535)


class PGMError(ValueError):
    """Malformed or unsupported PGM content."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


@dataclass(frozen=True)
class ImageGrid:
    data: np.ndarray
    h: float = 1.0

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"ImageGrid needs a non-empty 2D array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("ImageGrid values must be finite")
        if not self.h > 0:
            raise ValueError("spatial step h must be positive")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.data
        return self.data.astype(dtype)

    def ghost(self) -> "GhostView":
        return GhostView(self.data)

    def clamped(self, floor: float = FLOOR_INTENSITY) -> "ImageGrid":
        return ImageGrid(np.maximum(self.data, floor), self.h)


def as_array(img) -> np.ndarray:
    """Float64 2D view of an ImageGrid or array-like."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2D image, got shape {arr.shape}")
    return arr


def check_same_shape(*imgs: np.ndarray) -> None:
    shapes = {np.shape(a) for a in imgs}
    if len(shapes) != 1:
        raise ValueError(f"dimension mismatch: {sorted(shapes)}")


class GhostView:
    """Read access for ``i in [-1, M]``, ``j in [-1, N]`` by boundary replication.

    Replicating the edge pixel into the ghost cell is the discrete zero-flux
    (Neumann) condition.
    """

    def __init__(self, img):
        self._data = as_array(img)

    def __getitem__(self, ij: tuple[int, int]) -> float:
        i, j = ij
        n_rows, n_cols = self._data.shape
        if not (-1 <= i <= n_cols and -1 <= j <= n_rows):
            raise IndexError(f"ghost index {(i, j)} outside [-1, {n_cols}] x [-1, {n_rows}]")
        return float(self._data[min(max(j, 0), n_rows - 1), min(max(i, 0), n_cols - 1)])

    def padded(self) -> np.ndarray:
        """Array of shape ``(N + 2, M + 2)`` with the ghost ring filled in."""
        return np.pad(self._data, 1, mode="edge")


def minmax(img) -> tuple[float, float]:
    arr = as_array(img)
    return float(arr.min()), float(arr.max())


# ---------------------------------------------------------------------------
# PGM
# ---------------------------------------------------------------------------

def _header_tokens(buf: bytes, count: int) -> tuple[list[tuple[bytes, int]], int]:
    """Read ``count`` whitespace-separated header tokens, skipping ``#`` comments.

    Returns the tokens with their byte offsets and the offset just past the
    single whitespace byte that terminates the last token.
    """
    tokens = []
    pos = 0
    n = len(buf)
    while len(tokens) < count:
        while pos < n and (buf[pos:pos + 1].isspace() or buf[pos:pos + 1] == b"#"):
            if buf[pos:pos + 1] == b"#":
                while pos < n and buf[pos:pos + 1] not in (b"\n", b"\r"):
                    pos += 1
            else:
                pos += 1
        if pos >= n:
            raise PGMError("truncated header", pos)
        start = pos
        while pos < n and not buf[pos:pos + 1].isspace() and buf[pos:pos + 1] != b"#":
            pos += 1
        tokens.append((buf[start:pos], start))
    if pos >= n:
        raise PGMError("missing whitespace after header", pos)
    return tokens, pos + 1


def _header_int(token: bytes, offset: int, what: str) -> int:
    try:
        value = int(token)
    except ValueError:
        raise PGMError(f"bad {what} {token!r}", offset) from None
    return value


def parse_pgm(buf: bytes) -> ImageGrid:
    if len(buf) < 2:
        raise PGMError("file too short for a PGM magic number", 0)
    magic = buf[:2]
    if magic not in (b"P2", b"P5"):
        raise PGMError(f"unsupported magic {magic!r}", 0)
    (_, (w_tok, w_off), (h_tok, h_off), (m_tok, m_off)), body = _header_tokens(buf, 4)
    width = _header_int(w_tok, w_off, "width")
    height = _header_int(h_tok, h_off, "height")
    maxval = _header_int(m_tok, m_off, "maxval")
    if width <= 0:
        raise PGMError(f"degenerate width {width}", w_off)
    if height <= 0:
        raise PGMError(f"degenerate height {height}", h_off)
    if maxval not in _SUPPORTED_MAXVAL:
        raise PGMError(f"unsupported maxval {maxval}", m_off)
    count = width * height

    if magic == b"P5":
        dtype = np.dtype(np.uint8) if maxval == 255 else np.dtype(">u2")
        need = count * dtype.itemsize
        if len(buf) - body < need:
            raise PGMError(f"truncated payload: need {need} bytes, have {len(buf) - body}", len(buf))
        values = np.frombuffer(buf, dtype=dtype, count=count, offset=body).astype(np.float64)
    else:
        fields = buf[body:].split()
        if len(fields) < count:
            raise PGMError(f"truncated payload: need {count} samples, have {len(fields)}", len(buf))
        try:
            values = np.array([int(f) for f in fields[:count]], dtype=np.float64)
        except ValueError:
            raise PGMError("non-integer sample in ASCII payload", body) from None
    if values.max() > maxval:
        raise PGMError(f"sample exceeds maxval {maxval}", body)

    data = np.maximum(values.reshape(height, width) / maxval, FLOOR_INTENSITY)
    return ImageGrid(data, h=1.0)


def load_pgm(path) -> ImageGrid:
    path = Path(path)
    try:
        return parse_pgm(path.read_bytes())
    except PGMError as exc:
        raise PGMError(f"{path}: {exc.args[0].rsplit(' (byte offset', 1)[0]}", exc.offset) from None


def to_bytes(img) -> np.ndarray:
    """Clamp to [0, 1], scale by 255 and round half up to uint8."""
    arr = as_array(img)
    if not np.all(np.isfinite(arr)):
        raise ValueError("cannot encode non-finite values")
    return np.floor(np.clip(arr, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)


def save_pgm(img, path) -> None:
    pixels = to_bytes(img)
    height, width = pixels.shape
    payload = b"P5 %d %d 255\n" % (width, height) + pixels.tobytes()
    path = Path(path)
    try:
        path.write_bytes(payload)
    except OSError as exc:
        raise OSError(f"could not write PGM to {path}: {exc}") from exc
