"""Feature-stack fusion operators.

A feature stack is an (h, w, F) array; channels are paired positionally.
"""

from __future__ import annotations

import numpy as np

from .morphology import PoolSpec, boundary_map
from .validation import check_same_shape, check_stack

__all__ = ["multiply_features", "add_boundary_detail"]


def multiply_features(high: np.ndarray, low: np.ndarray) -> np.ndarray:
    """Element-wise product of two stacks: high-level features gate low-level ones."""
    high = check_stack(high, "high")
    low = check_stack(low, "low")
    check_same_shape(high, low, "feature stacks")
    return high * low


def add_boundary_detail(
    high: np.ndarray, low: np.ndarray, spec: PoolSpec = PoolSpec()
) -> np.ndarray:
    """Residual fusion: out_c = high_c + low_c * boundary(high_c).

    The boundary map of each high-level channel gates where the paired
    low-level channel may inject detail; flat high-level regions pass
    through unchanged.
    """
    high = check_stack(high, "high")
    low = check_stack(low, "low")
    check_same_shape(high, low, "feature stacks")
    if not spec.preserves_size:
        raise ValueError(f"fusion needs a size-preserving pool spec, got {spec}")
    out = np.empty_like(high)
    for c in range(high.shape[2]):
        out[:, :, c] = high[:, :, c] + low[:, :, c] * boundary_map(high[:, :, c], spec)
    return out
