"""Dataset directory layout: images/, masks/, and a plain-text manifest.

Manifest format, one record per line:

    <relative image path> <relative mask path or "-"> <image-level label or "-">
"""

from __future__ import annotations

import os

import numpy as np

from .pnm import load_mask, load_pnm, save_mask, save_pnm

__all__ = ["write_dataset", "read_manifest", "load_dataset", "MANIFEST_NAME"]

MANIFEST_NAME = "manifest.txt"


def write_dataset(out_dir, pairs, labels=None) -> None:
    """Write (image, mask) pairs as PPM/PGM plus a manifest.

    `labels` optionally attaches an image-level class id to each record.
    """
    out_dir = os.fspath(out_dir)
    if labels is not None and len(labels) != len(pairs):
        raise ValueError("labels must align with pairs")
    img_dir = os.path.join(out_dir, "images")
    mask_dir = os.path.join(out_dir, "masks")
    os.makedirs(img_dir, exist_ok=True)
    os.makedirs(mask_dir, exist_ok=True)
    lines = []
    for i, (img, mask) in enumerate(pairs):
        img_rel = f"images/{i:04d}.ppm"
        mask_rel = f"masks/{i:04d}.pgm"
        save_pnm(np.asarray(img), os.path.join(out_dir, img_rel))
        save_mask(np.asarray(mask), os.path.join(out_dir, mask_rel))
        label = "-" if labels is None else str(int(labels[i]))
        lines.append(f"{img_rel} {mask_rel} {label}")
    with open(os.path.join(out_dir, MANIFEST_NAME), "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_manifest(dataset_dir) -> list[tuple[str, str | None, int | None]]:
    """Parse the manifest into absolute (image, mask, label) records."""
    dataset_dir = os.fspath(dataset_dir)
    path = os.path.join(dataset_dir, MANIFEST_NAME)
    records = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 fields, got {len(parts)}")
            img_rel, mask_rel, label = parts
            records.append(
                (
                    os.path.join(dataset_dir, img_rel),
                    None if mask_rel == "-" else os.path.join(dataset_dir, mask_rel),
                    None if label == "-" else int(label),
                )
            )
    return records


def load_dataset(dataset_dir):
    """Load every record: (images, masks, labels); missing entries are None."""
    images, masks, labels = [], [], []
    for img_path, mask_path, label in read_manifest(dataset_dir):
        images.append(load_pnm(img_path))
        masks.append(None if mask_path is None else load_mask(mask_path))
        labels.append(label)
    return images, masks, labels
