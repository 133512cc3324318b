"""Deterministic handcrafted features standing in for a learned backbone.

Low-level channels carry raw appearance and position; high-level channels
are the same channels smoothed over a wide window, giving the classifier
a noise-robust context view of each pixel. Both stacks always have the
same channel count so fusion can pair them positionally.

The recipe is versioned: models persist the spec string and refuse to
run on features produced by a different recipe.
"""

from __future__ import annotations

import numpy as np

from .core import box_mean, to_grayscale
from .fusion import add_boundary_detail, multiply_features
from .morphology import PoolSpec, boundary_map
from .validation import check_image

__all__ = ["LOW_CHANNELS", "feature_spec", "extract_features", "fused_features", "n_channels"]

LOW_CHANNELS = ("red", "green", "blue", "gray", "edge", "x", "y")

_EDGE_SPEC = PoolSpec(kernel=3, stride=1, padding=1)


def n_channels() -> int:
    return len(LOW_CHANNELS)


def feature_spec(high_radius: int) -> str:
    """Identifier of the exact channel recipe, persisted with trained models."""
    return f"lowhigh-v1/r{high_radius}"


def extract_features(img: np.ndarray, high_radius: int = 4) -> tuple[np.ndarray, np.ndarray]:
    """Build the (low, high) feature stacks for one image.

    Low channels: R, G, B, grayscale, grayscale boundary map, and the
    normalised x/y pixel coordinates. High channels: each low channel
    box-averaged at `high_radius`.
    """
    img = check_image(img)
    if high_radius < 0:
        raise ValueError(f"high_radius must be >= 0, got {high_radius}")
    h, w = img.shape[:2]
    gray = to_grayscale(img)
    xs = np.tile(np.arange(w, dtype=np.float64) / w, (h, 1))
    ys = np.tile((np.arange(h, dtype=np.float64) / h)[:, None], (1, w))
    low = np.stack(
        [
            img[:, :, 0],
            img[:, :, 1],
            img[:, :, 2],
            gray,
            boundary_map(gray, _EDGE_SPEC),
            xs,
            ys,
        ],
        axis=2,
    )
    high = np.stack([box_mean(low[:, :, c], high_radius) for c in range(low.shape[2])], axis=2)
    return low, high


def fused_features(img: np.ndarray, high_radius: int = 4) -> tuple[np.ndarray, np.ndarray]:
    """Full feature pipeline for one image.

    Returns (fused, guide): the boundary-fused stack fed to the
    classifier, and the first gated channel used as the guidance plane
    when refining probability maps.
    """
    low, high = extract_features(img, high_radius)
    gated = multiply_features(high, low)
    fused = add_boundary_detail(high, gated)
    return fused, gated[:, :, 0]
