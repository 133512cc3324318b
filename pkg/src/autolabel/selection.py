"""Pseudo-label reliability selection and probability-map binarization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .validation import check_mask, check_probmap

__all__ = ["SelectionPolicy", "area_ratio", "select_reliable", "binarize"]


@dataclass(frozen=True)
class SelectionPolicy:
    """Area-ratio band for accepting a pseudo-label mask.

    A mask whose labelled fraction falls outside [lo, hi] is treated as
    unreliable (object lost, or label flooding the frame) and excluded
    from training. `tau` is the foreground threshold used when
    binarizing two-class probability maps.
    """

    lo: float = 0.1
    hi: float = 0.9
    tau: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.lo < self.hi <= 1.0:
            raise ValueError(f"need 0 <= lo < hi <= 1, got lo={self.lo} hi={self.hi}")
        if not 0.0 < self.tau < 1.0:
            raise ValueError(f"tau must lie in (0, 1), got {self.tau}")


def area_ratio(mask: np.ndarray) -> float:
    """Fraction of pixels carrying any non-background label."""
    mask = check_mask(mask)
    return float(np.count_nonzero(mask) / mask.size)


def select_reliable(masks, policy: SelectionPolicy = SelectionPolicy()) -> tuple[list[int], list[int]]:
    """Partition mask indices into (selected, rejected) by area ratio.

    Bounds are inclusive; every index lands in exactly one list.
    """
    selected, rejected = [], []
    for i, mask in enumerate(masks):
        ratio = area_ratio(mask)
        (selected if policy.lo <= ratio <= policy.hi else rejected).append(i)
    return selected, rejected


def binarize(probs: np.ndarray, tau: float = 0.5) -> np.ndarray:
    """Hard labels from a probability map.

    Two classes: foreground wherever the class-1 probability reaches tau.
    More classes: per-pixel argmax, ties resolved to the lowest class id.
    """
    probs = check_probmap(probs)
    if not 0.0 < tau < 1.0:
        raise ValueError(f"tau must lie in (0, 1), got {tau}")
    if probs.shape[2] == 1:
        return np.zeros(probs.shape[:2], dtype=np.int64)
    if probs.shape[2] == 2:
        return (probs[:, :, 1] >= tau).astype(np.int64)
    return np.argmax(probs, axis=2).astype(np.int64)
