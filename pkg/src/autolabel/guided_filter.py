"""Edge-preserving guided filter, in two interchangeable forms.

`guided_filter` is the production path: the locally-linear a/b
decomposition where every window statistic comes from a box mean, O(n)
per image. `guided_filter_naive` evaluates the per-pixel-pair weight
kernel literally and is quadratic in the pixel count; it exists as an
independent cross-check and for inspecting the weights themselves.

Both share one border policy: windows clip at the raster edge and every
average divides by the actual in-bounds count. Under that policy the two
forms are algebraically identical over the whole image, borders included,
and the weight matrix rows sum to exactly 1.
"""

from __future__ import annotations

import numpy as np

from .core import box_mean, window_counts
from .validation import check_plane, check_probmap, check_same_shape

__all__ = [
    "guided_filter",
    "guided_filter_naive",
    "guided_filter_weights",
    "refine_probmap",
]


def _check_params(radius: int, eps: float) -> None:
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    if not eps > 0:
        raise ValueError(f"eps must be > 0, got {eps}")


def guided_filter(guide: np.ndarray, src: np.ndarray, radius: int, eps: float) -> np.ndarray:
    """Filter `src` so its structure follows the edges of `guide`.

    Per window k: a_k = cov(guide, src) / (var(guide) + eps) and
    b_k = mean(src) - a_k mean(guide); the output blends the per-window
    linear models, g = mean(a) * guide + mean(b).

    Args:
        guide: single-channel guidance raster.
        src: raster to filter, same dimensions as the guide.
        radius: window radius; the window side is 2 * radius + 1.
        eps: regularizer added to the guide variance; larger values
            smooth more and track edges less.
    """
    guide = check_plane(guide, "guide")
    src = check_plane(src, "src")
    check_same_shape(guide, src, "guide and src")
    _check_params(radius, eps)
    mean_i = box_mean(guide, radius)
    mean_p = box_mean(src, radius)
    corr_ip = box_mean(guide * src, radius)
    corr_ii = box_mean(guide * guide, radius)
    var_i = corr_ii - mean_i * mean_i
    cov_ip = corr_ip - mean_i * mean_p
    a = cov_ip / (var_i + eps)
    b = mean_p - a * mean_i
    return box_mean(a, radius) * guide + box_mean(b, radius)


def guided_filter_weights(guide: np.ndarray, radius: int, eps: float) -> np.ndarray:
    """Full (n, n) weight matrix W with output = W @ src.ravel().

    W[i, j] = sum over windows k containing both pixels of
    (1 + (I_i - mu_k)(I_j - mu_k) / (sigma_k^2 + eps)) / (|w_i| |w_k|),
    with mu/sigma^2 the window mean and population variance and |.| the
    in-bounds cell counts. Quadratic in pixels; intended for small inputs.
    """
    guide = check_plane(guide, "guide")
    _check_params(radius, eps)
    h, w = guide.shape
    n = h * w
    flat_index = np.arange(n).reshape(h, w)
    weights = np.zeros((n, n), dtype=np.float64)
    for ky in range(h):
        for kx in range(w):
            patch = guide[
                max(ky - radius, 0) : min(ky + radius + 1, h),
                max(kx - radius, 0) : min(kx + radius + 1, w),
            ]
            idx = flat_index[
                max(ky - radius, 0) : min(ky + radius + 1, h),
                max(kx - radius, 0) : min(kx + radius + 1, w),
            ].ravel()
            centered = patch.ravel() - patch.mean()
            kernel = 1.0 + np.outer(centered, centered) / (patch.var() + eps)
            weights[np.ix_(idx, idx)] += kernel / patch.size
    weights /= window_counts(h, w, radius).reshape(n, 1)
    return weights


def guided_filter_naive(guide: np.ndarray, src: np.ndarray, radius: int, eps: float) -> np.ndarray:
    """Literal weight-kernel evaluation of the filter; O(n * k^4).

    Agrees with `guided_filter` to floating-point rounding; use only on
    small inputs.
    """
    src = check_plane(src, "src")
    check_same_shape(np.asarray(guide, dtype=np.float64), src, "guide and src")
    weights = guided_filter_weights(guide, radius, eps)
    return (weights @ src.ravel()).reshape(src.shape)


def refine_probmap(guide: np.ndarray, probs: np.ndarray, radius: int, eps: float) -> np.ndarray:
    """Guided-filter every class plane, then restore a per-pixel distribution.

    Filtered channels are clamped to [0, 1] and renormalised pixel-wise;
    a pixel whose channels all collapse to zero falls back to uniform.
    """
    guide = check_plane(guide, "guide")
    probs = check_probmap(probs)
    if probs.shape[:2] != guide.shape:
        raise ValueError(f"guide {guide.shape} does not match probmap {probs.shape[:2]}")
    n_classes = probs.shape[2]
    out = np.empty_like(probs)
    for c in range(n_classes):
        out[:, :, c] = guided_filter(guide, probs[:, :, c], radius, eps)
    np.clip(out, 0.0, 1.0, out=out)
    sums = out.sum(axis=2, keepdims=True)
    zero = sums[:, :, 0] == 0.0
    if zero.any():
        out[zero] = 1.0 / n_classes
        sums = out.sum(axis=2, keepdims=True)
    return out / sums
