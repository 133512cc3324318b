"""Sliding-window max/min pooling and the pooling-difference boundary map."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .validation import check_plane

__all__ = ["PoolSpec", "pool", "boundary_map"]


@dataclass(frozen=True)
class PoolSpec:
    """Square pooling window: odd kernel side, stride, zero-free padding.

    Padded cells never enter the extremum; padding only widens the output
    grid. `padding < kernel` guarantees every window sees at least one
    in-bounds cell.
    """

    kernel: int = 3
    stride: int = 1
    padding: int = 1

    def __post_init__(self):
        if self.kernel < 1 or self.kernel % 2 == 0:
            raise ValueError(f"kernel must be odd and >= 1, got {self.kernel}")
        if self.stride < 1:
            raise ValueError(f"stride must be >= 1, got {self.stride}")
        if not 0 <= self.padding < self.kernel:
            raise ValueError(f"padding must satisfy 0 <= padding < kernel, got {self.padding}")

    def out_dim(self, dim: int) -> int:
        return (dim + 2 * self.padding - self.kernel) // self.stride + 1

    @property
    def preserves_size(self) -> bool:
        return self.stride == 1 and 2 * self.padding == self.kernel - 1


def pool(x: np.ndarray, spec: PoolSpec, mode: str = "max") -> np.ndarray:
    """Max or min over each (kernel x kernel) window, in-bounds cells only.

    Output dims are floor((dim + 2 padding - kernel) / stride) + 1 per axis.
    An infinite sentinel in the padded ring is equivalent to excluding the
    padded cells from the extremum, and keeps the kernel vectorised.
    """
    x = check_plane(x)
    if mode not in ("max", "min"):
        raise ValueError(f"mode must be 'max' or 'min', got {mode!r}")
    h, w = x.shape
    oh, ow = spec.out_dim(h), spec.out_dim(w)
    if oh < 1 or ow < 1:
        raise ValueError(f"window {spec.kernel} exceeds padded input {h}x{w}")
    sentinel = -np.inf if mode == "max" else np.inf
    padded = np.pad(x, spec.padding, mode="constant", constant_values=sentinel)
    windows = sliding_window_view(padded, (spec.kernel, spec.kernel))
    windows = windows[:: spec.stride, :: spec.stride][:oh, :ow]
    reduce = np.max if mode == "max" else np.min
    return reduce(windows, axis=(2, 3))


def boundary_map(x: np.ndarray, spec: PoolSpec = PoolSpec()) -> np.ndarray:
    """Max-pool minus min-pool: large near intensity edges, ~0 in flat regions.

    Requires a size-preserving spec (stride 1, padding (kernel-1)/2); the
    result is non-negative everywhere.
    """
    if not spec.preserves_size:
        raise ValueError(
            f"boundary map needs stride 1 and padding (kernel-1)/2, got {spec}"
        )
    return pool(x, spec, "max") - pool(x, spec, "min")
