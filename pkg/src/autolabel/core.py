"""Raster primitives: grayscale conversion, integral images, box means.

The integral image gives every windowed statistic in O(1) per pixel.
Windows are always clipped to the raster bounds and divided by the
in-bounds cell count, so no padding value is ever invented.
"""

from __future__ import annotations

import numpy as np

from .validation import check_image, check_plane

__all__ = [
    "GRAY_WEIGHTS",
    "to_grayscale",
    "integral_image",
    "window_sum",
    "box_mean",
    "window_counts",
]

# ITU-R BT.601 luma weights
GRAY_WEIGHTS = np.array([0.299, 0.587, 0.114])


def to_grayscale(img: np.ndarray) -> np.ndarray:
    """Per-pixel 0.299 R + 0.587 G + 0.114 B."""
    img = check_image(img)
    return img @ GRAY_WEIGHTS


def integral_image(p: np.ndarray) -> np.ndarray:
    """Summed-area table with a zero row/column prepended.

    Entry (i, j) is the sum of all source values in rows < i, cols < j,
    so any rectangle sum is four lookups.
    """
    p = check_plane(p)
    h, w = p.shape
    out = np.zeros((h + 1, w + 1), dtype=np.float64)
    np.cumsum(p, axis=0, out=out[1:, 1:])
    np.cumsum(out[1:, 1:], axis=1, out=out[1:, 1:])
    return out


def window_sum(ii: np.ndarray, top: int, left: int, bottom: int, right: int) -> float:
    """Sum of source rows [top, bottom) x cols [left, right) from an integral image."""
    return float(ii[bottom, right] - ii[top, right] - ii[bottom, left] + ii[top, left])


def window_counts(h: int, w: int, r: int) -> np.ndarray:
    """In-bounds cell count of the (2r+1)^2 window centred at each pixel."""
    rows = np.minimum(np.arange(h) + r + 1, h) - np.maximum(np.arange(h) - r, 0)
    cols = np.minimum(np.arange(w) + r + 1, w) - np.maximum(np.arange(w) - r, 0)
    return rows[:, None].astype(np.float64) * cols[None, :]


def box_mean(p: np.ndarray, r: int) -> np.ndarray:
    """Mean over the (2r+1)^2 window clipped to the raster bounds.

    The divisor is the actual in-bounds cell count, so border means stay
    unbiased. r=0 is the identity.
    """
    p = check_plane(p)
    if r < 0:
        raise ValueError(f"radius must be >= 0, got {r}")
    if r == 0:
        return p.copy()
    h, w = p.shape
    ii = integral_image(p)
    top = np.maximum(np.arange(h) - r, 0)
    bot = np.minimum(np.arange(h) + r + 1, h)
    left = np.maximum(np.arange(w) - r, 0)
    right = np.minimum(np.arange(w) + r + 1, w)
    sums = (
        ii[bot[:, None], right[None, :]]
        - ii[top[:, None], right[None, :]]
        - ii[bot[:, None], left[None, :]]
        + ii[top[:, None], left[None, :]]
    )
    return sums / window_counts(h, w, r)
