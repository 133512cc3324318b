"""Otsu's automatic threshold and binary mask extraction."""

from __future__ import annotations

import numpy as np

from .core import to_grayscale
from .validation import check_image

__all__ = ["between_class_variance", "otsu_threshold", "quantize_bins", "otsu_mask"]


def between_class_variance(hist: np.ndarray) -> np.ndarray:
    """Between-class variance w0(t) w1(t) (mu0(t) - mu1(t))^2 for every t.

    Class 0 is bins <= t. Thresholds leaving either class empty score 0.
    """
    hist = np.asarray(hist)
    if hist.shape != (256,):
        raise ValueError(f"expected a 256-bin histogram, got shape {hist.shape}")
    if (hist < 0).any():
        raise ValueError("histogram counts must be non-negative")
    counts = hist.astype(np.int64)
    total = int(counts.sum())
    if total < 1:
        raise ValueError("histogram is empty")
    bins = np.arange(256, dtype=np.int64)
    n0 = np.cumsum(counts)
    s0 = np.cumsum(counts * bins)
    n1 = total - n0
    s1 = int((counts * bins).sum()) - s0
    var = np.zeros(256, dtype=np.float64)
    valid = (n0 > 0) & (n1 > 0)
    m0 = s0[valid] / n0[valid]
    m1 = s1[valid] / n1[valid]
    var[valid] = (n0[valid] / total) * (n1[valid] / total) * (m0 - m1) ** 2
    return var


def otsu_threshold(hist: np.ndarray) -> int:
    """Threshold t in 0..255 maximizing between-class variance; ties take the smallest t."""
    return int(np.argmax(between_class_variance(hist)))


def quantize_bins(plane: np.ndarray) -> np.ndarray:
    """Map [0, 1] values to 8-bit bins by round-half-up."""
    return np.clip(np.floor(plane * 255.0 + 0.5), 0, 255).astype(np.int64)


def otsu_mask(img: np.ndarray, polarity: str = "auto") -> np.ndarray:
    """Binary foreground mask via Otsu's threshold on the grayscale histogram.

    Args:
        img: RGB image.
        polarity: which side of the threshold is the object.
            'fg-bright' labels bins > t, 'fg-dark' labels bins <= t, and
            'auto' picks the side with the smaller pixel count (the
            object is assumed smaller than the background; a tie goes to
            the bright side).
    """
    img = check_image(img)
    if polarity not in ("fg-bright", "fg-dark", "auto"):
        raise ValueError(f"unknown polarity {polarity!r}")
    bins = quantize_bins(to_grayscale(img))
    hist = np.bincount(bins.ravel(), minlength=256)
    t = otsu_threshold(hist)
    bright = bins > t
    if polarity == "fg-bright":
        fg = bright
    elif polarity == "fg-dark":
        fg = ~bright
    else:
        n_bright = int(bright.sum())
        fg = bright if n_bright <= bright.size - n_bright else ~bright
    return fg.astype(np.int64)
