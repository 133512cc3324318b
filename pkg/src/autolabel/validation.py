"""Input validation helpers shared by every module.

All public entry points normalise their array inputs through these
checks so the numeric kernels can assume well-formed float64 data.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "check_plane",
    "check_image",
    "check_mask",
    "check_probmap",
    "check_stack",
    "check_same_shape",
]


def check_plane(p, name: str = "plane") -> np.ndarray:
    """Validate a single-channel raster: 2-D, finite, float64."""
    arr = np.asarray(p, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must be a 2-D array with positive dimensions, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_image(img, name: str = "image") -> np.ndarray:
    """Validate an RGB raster: (h, w, 3), finite, values in [0, 1]."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 3 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must have shape (h, w, 3), got {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite values")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise ValueError(f"{name} values must lie in [0, 1]")
    return arr


def check_mask(m, name: str = "mask", n_classes: int | None = None) -> np.ndarray:
    """Validate a label raster: 2-D, non-negative integer class ids."""
    arr = np.asarray(m)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must be a 2-D array with positive dimensions, got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.issubdtype(arr.dtype, np.floating) or not (arr == np.floor(arr)).all():
            raise ValueError(f"{name} must hold integer class ids")
        arr = arr.astype(np.int64)
    if arr.min() < 0:
        raise ValueError(f"{name} class ids must be non-negative")
    if n_classes is not None and arr.max() >= n_classes:
        raise ValueError(f"{name} holds class id {int(arr.max())} but only {n_classes} classes exist")
    return arr.astype(np.int64)


def check_probmap(p, name: str = "probmap") -> np.ndarray:
    """Validate a per-pixel class distribution: (h, w, C), rows summing to 1."""
    arr = np.asarray(p, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] < 1:
        raise ValueError(f"{name} must have shape (h, w, C), got {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite values")
    if arr.min() < -1e-9:
        raise ValueError(f"{name} has negative probabilities")
    sums = arr.sum(axis=2)
    if np.abs(sums - 1.0).max() > 1e-6:
        raise ValueError(f"{name} rows must sum to 1 (worst deviation {np.abs(sums - 1.0).max():.3g})")
    return arr


def check_stack(s, name: str = "stack") -> np.ndarray:
    """Validate a feature stack: (h, w, F) with F >= 1, finite."""
    arr = np.asarray(s, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] < 1:
        raise ValueError(f"{name} must have shape (h, w, F) with F >= 1, got {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_same_shape(a: np.ndarray, b: np.ndarray, what: str = "inputs") -> None:
    if a.shape != b.shape:
        raise ValueError(f"{what} must share dimensions, got {a.shape} vs {b.shape}")
