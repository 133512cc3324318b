"""Binary netpbm I/O (PGM P5 and PPM P6, maxval 255).

Grayscale planes and RGB images are stored quantized to 8 bits and scaled
back to [0, 1] on load.  Label masks use the same P5 container but store
the class id directly in the byte (0..254), with no scaling.
"""

from __future__ import annotations

import os

import numpy as np

from .validation import check_image, check_mask, check_plane

__all__ = [
    "PnmError",
    "PnmHeaderError",
    "PnmPayloadError",
    "PnmMaxvalError",
    "load_pnm",
    "save_pnm",
    "load_mask",
    "save_mask",
]


class PnmError(ValueError):
    """Base error for malformed netpbm files."""


class PnmHeaderError(PnmError):
    """Magic number or header fields are missing or malformed."""


class PnmPayloadError(PnmError):
    """Pixel payload is shorter than the header promises."""


class PnmMaxvalError(PnmError):
    """File uses a maxval other than 255."""


def _read_header(data: bytes, path: str) -> tuple[bytes, int, int, int, int]:
    """Parse `magic width height maxval` and return them plus the payload offset.

    Tokens are separated by whitespace; `#` comments run to end of line.
    """
    magic = data[:2]
    if magic not in (b"P5", b"P6"):
        raise PnmHeaderError(f"{path}: unsupported magic {magic!r} (expected P5 or P6)")
    pos = 2
    fields: list[int] = []
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        token = data[start:pos]
        if not token.isdigit():
            raise PnmHeaderError(f"{path}: malformed header token {token!r}")
        fields.append(int(token))
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise PnmHeaderError(f"{path}: header not terminated by whitespace")
    pos += 1  # single whitespace byte before the payload
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise PnmHeaderError(f"{path}: non-positive dimensions {width}x{height}")
    if maxval != 255:
        raise PnmMaxvalError(f"{path}: unsupported maxval {maxval} (only 255)")
    return magic, width, height, maxval, pos


def _read_payload(path) -> tuple[bytes, np.ndarray, int, int]:
    path = os.fspath(path)
    with open(path, "rb") as fh:
        data = fh.read()
    magic, width, height, _, offset = _read_header(data, path)
    n = width * height * (3 if magic == b"P6" else 1)
    payload = data[offset : offset + n]
    if len(payload) < n:
        raise PnmPayloadError(f"{path}: payload truncated ({len(payload)} of {n} bytes)")
    return magic, np.frombuffer(payload, dtype=np.uint8), width, height


def load_pnm(path) -> np.ndarray:
    """Load a binary PGM/PPM file.

    Returns an (h, w) plane for P5 or an (h, w, 3) image for P6, with
    byte values scaled to [0, 1] by division by 255.
    """
    magic, raw, width, height = _read_payload(path)
    if magic == b"P5":
        return raw.reshape(height, width).astype(np.float64) / 255.0
    return raw.reshape(height, width, 3).astype(np.float64) / 255.0


def save_pnm(arr: np.ndarray, path) -> None:
    """Save a plane (P5) or image (P6); values in [0, 1] quantize to 8 bits."""
    arr = np.asarray(arr, dtype=np.float64)
    if arr.ndim == 2:
        arr = check_plane(arr)
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError("plane values must lie in [0, 1] for 8-bit output")
        magic, payload = b"P5", arr
    elif arr.ndim == 3:
        arr = check_image(arr)
        magic, payload = b"P6", arr
    else:
        raise ValueError(f"expected (h, w) or (h, w, 3), got shape {arr.shape}")
    # round-half-up quantization, matching the histogram binning rule
    quant = np.floor(payload * 255.0 + 0.5).astype(np.uint8)
    h, w = arr.shape[:2]
    with open(os.fspath(path), "wb") as fh:
        fh.write(magic + b"\n%d %d\n255\n" % (w, h))
        fh.write(quant.tobytes())


def load_mask(path) -> np.ndarray:
    """Load a label mask stored as P5: each byte is the class id, unscaled."""
    magic, raw, width, height = _read_payload(path)
    if magic != b"P5":
        raise PnmHeaderError(f"{os.fspath(path)}: masks must be P5, got {magic!r}")
    return raw.reshape(height, width).astype(np.int64)


def save_mask(mask: np.ndarray, path) -> None:
    """Save a label mask as P5 with class ids stored directly (0..254)."""
    mask = check_mask(mask)
    if mask.max() > 254:
        raise ValueError("mask class ids must be <= 254 for P5 serialization")
    h, w = mask.shape
    with open(os.fspath(path), "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (w, h))
        fh.write(mask.astype(np.uint8).tobytes())
