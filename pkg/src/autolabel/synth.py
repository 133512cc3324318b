"""Deterministic synthetic scenes with exact ground-truth masks.

Two difficulty tiers share one foreground model (a red-dominant object on
a green-tinted background, so the channel difference R - G separates the
classes in both tiers):

* simple: constant background whose gray level sits at least 0.25 above
  the object's, so a histogram threshold recovers the mask almost exactly;
* complex: gradient or striped backgrounds whose gray range overlaps the
  object's, plus bounded noise, so histogram thresholding degrades and
  learned refinement has headroom.

Every sample is generated from its own seed derived from (spec.seed,
tier, index), so datasets are bit-reproducible and order-independent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import GRAY_WEIGHTS

__all__ = ["SceneSpec", "gen_simple", "gen_complex", "gen_samples"]

_SIMPLE, _COMPLEX = 0, 1
# per-image gray gap between background and object in the simple tier
_SIMPLE_GAP = 0.25


@dataclass(frozen=True)
class SceneSpec:
    """Knobs for the scene generator.

    The object's area fraction is kept inside [0.1, 0.9] by construction
    (redrawing until the rasterised shape lands in the band).
    """

    side: int = 32
    shapes: tuple[str, ...] = ("disk", "rectangle", "blob")
    fg_range: tuple[float, float] = (0.55, 0.9)
    noise: float = 0.02
    seed: int = 0

    def __post_init__(self):
        if self.side < 8:
            raise ValueError("side must be >= 8")
        if not self.shapes or any(s not in ("disk", "rectangle", "blob") for s in self.shapes):
            raise ValueError(f"unknown shape family in {self.shapes}")
        lo, hi = self.fg_range
        if not 0.0 <= lo <= hi <= 1.0:
            raise ValueError("fg_range must satisfy 0 <= lo <= hi <= 1")
        if not 0.0 <= self.noise <= 0.2:
            raise ValueError("noise amplitude must lie in [0, 0.2]")


def _disk(side: int, cy: float, cx: float, r: float) -> np.ndarray:
    yy, xx = np.mgrid[0:side, 0:side]
    return (yy - cy) ** 2 + (xx - cx) ** 2 <= r * r


def _draw_shape(rng: np.random.Generator, spec: SceneSpec) -> tuple[np.ndarray, int]:
    """Rasterise one object mask with area fraction in [0.1, 0.42].

    Keeping the object a strict minority of the frame makes the
    smaller-pixel-count polarity rule unambiguous and leaves every
    ground-truth mask inside the default selection band.
    """
    side = spec.side
    for _ in range(100):
        shape_idx = int(rng.integers(len(spec.shapes)))
        kind = spec.shapes[shape_idx]
        if kind == "disk":
            r = rng.uniform(0.19, 0.35) * side
            cy = rng.uniform(r, side - r)
            cx = rng.uniform(r, side - r)
            mask = _disk(side, cy, cx, r)
        elif kind == "rectangle":
            rh = rng.uniform(0.33, 0.62) * side
            rw = rng.uniform(0.33, 0.62) * side
            top = rng.uniform(0, side - rh)
            left = rng.uniform(0, side - rw)
            yy, xx = np.mgrid[0:side, 0:side]
            mask = (yy >= top) & (yy < top + rh) & (xx >= left) & (xx < left + rw)
        else:  # blob: a core disk plus two overlapping satellites
            r0 = rng.uniform(0.16, 0.26) * side
            cy = rng.uniform(r0 * 1.6, side - r0 * 1.6)
            cx = rng.uniform(r0 * 1.6, side - r0 * 1.6)
            mask = _disk(side, cy, cx, r0)
            for _ in range(2):
                rs = rng.uniform(0.5, 0.8) * r0
                ang = rng.uniform(0, 2 * np.pi)
                sy = np.clip(cy + np.cos(ang) * r0, rs, side - rs)
                sx = np.clip(cx + np.sin(ang) * r0, rs, side - rs)
                mask |= _disk(side, sy, sx, rs)
        frac = mask.mean()
        if 0.1 <= frac <= 0.42:
            return mask, shape_idx
    raise RuntimeError("could not draw an object inside the area band")


def _fg_color(rng: np.random.Generator, spec: SceneSpec) -> np.ndarray:
    red = rng.uniform(*spec.fg_range)
    return np.array([red, rng.uniform(0.05, 0.35), rng.uniform(0.05, 0.35)])


def _green_tint(rng: np.random.Generator) -> np.ndarray:
    """Zero-gray channel offset: lifts green, dips red/blue."""
    d_red = rng.uniform(0.02, 0.09)
    d_blue = rng.uniform(0.02, 0.09)
    d_green = (GRAY_WEIGHTS[0] * d_red + GRAY_WEIGHTS[2] * d_blue) / GRAY_WEIGHTS[1]
    return np.array([-d_red, d_green, -d_blue])


def _bg_simple(rng: np.random.Generator, side: int, fg_gray: float) -> np.ndarray:
    target = rng.uniform(fg_gray + _SIMPLE_GAP, 0.93)
    color = np.clip(target + _green_tint(rng), 0.0, 1.0)
    return np.broadcast_to(color, (side, side, 3)).copy()


def _bg_complex(rng: np.random.Generator, side: int) -> np.ndarray:
    tint = _green_tint(rng)
    yy, xx = np.mgrid[0:side, 0:side]
    if rng.random() < 0.5:
        # linear gray ramp along a random direction
        ang = rng.uniform(0, 2 * np.pi)
        t = (np.cos(ang) * xx + np.sin(ang) * yy) / side
        t = (t - t.min()) / max(t.max() - t.min(), 1e-12)
        g0 = rng.uniform(0.15, 0.5)
        g1 = rng.uniform(0.5, 0.9)
        gray = g0 + (g1 - g0) * t
    else:
        # oriented stripes around a mid gray
        base = rng.uniform(0.3, 0.7)
        amp = rng.uniform(0.12, 0.25)
        fx = rng.uniform(1.5, 5.0)
        fy = rng.uniform(1.5, 5.0)
        phase = rng.uniform(0, 2 * np.pi)
        gray = base + amp * np.sin(2 * np.pi * (fx * xx + fy * yy) / side + phase)
    return np.clip(gray[:, :, None] + tint, 0.0, 1.0)


def _render(rng: np.random.Generator, spec: SceneSpec, tier: int) -> tuple[np.ndarray, np.ndarray, int]:
    mask, shape_idx = _draw_shape(rng, spec)
    fg = _fg_color(rng, spec)
    if tier == _SIMPLE:
        img = _bg_simple(rng, spec.side, float(fg @ GRAY_WEIGHTS))
    else:
        img = _bg_complex(rng, spec.side)
    img[mask] = fg
    if spec.noise > 0:
        img += rng.uniform(-spec.noise, spec.noise, img.shape)
    np.clip(img, 0.0, 1.0, out=img)
    return img, mask.astype(np.int64), shape_idx


def gen_samples(spec: SceneSpec, n: int, mode: str) -> list[tuple[np.ndarray, np.ndarray, int]]:
    """Generate n (image, mask, shape_index) triples for 'simple' or 'complex'."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if mode not in ("simple", "complex"):
        raise ValueError(f"mode must be 'simple' or 'complex', got {mode!r}")
    tier = _SIMPLE if mode == "simple" else _COMPLEX
    out = []
    for i in range(n):
        rng = np.random.default_rng((spec.seed, tier, i))
        out.append(_render(rng, spec, tier))
    return out


def gen_simple(spec: SceneSpec, n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Constant-background scenes a histogram threshold can segment."""
    return [(img, mask) for img, mask, _ in gen_samples(spec, n, "simple")]


def gen_complex(spec: SceneSpec, n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Textured/gradient scenes where histogram thresholding degrades."""
    return [(img, mask) for img, mask, _ in gen_samples(spec, n, "complex")]
