"""Segmentation quality metrics: IoU, dataset mIoU, pixel accuracy."""

from __future__ import annotations

import numpy as np

from .validation import check_mask, check_same_shape

__all__ = ["iou", "intersection_union", "per_class_iou", "miou", "pixel_accuracy", "format_metrics"]


def iou(pred: np.ndarray, gt: np.ndarray, c: int) -> float:
    """Intersection over union of class c between two masks.

    Defined as 1.0 when the class is absent from both.
    """
    pred = check_mask(pred, "pred")
    gt = check_mask(gt, "gt")
    check_same_shape(pred, gt, "masks")
    p = pred == c
    g = gt == c
    union = int(np.logical_or(p, g).sum())
    if union == 0:
        return 1.0
    return int(np.logical_and(p, g).sum()) / union


def intersection_union(
    preds: list[np.ndarray], gts: list[np.ndarray], n_classes: int
) -> tuple[np.ndarray, np.ndarray]:
    """Dataset-aggregated per-class intersection and union pixel counts."""
    if n_classes < 1:
        raise ValueError("n_classes must be >= 1")
    if len(preds) != len(gts):
        raise ValueError(f"{len(preds)} predictions vs {len(gts)} ground truths")
    if not preds:
        raise ValueError("empty dataset")
    inter = np.zeros(n_classes, dtype=np.int64)
    union = np.zeros(n_classes, dtype=np.int64)
    for pred, gt in zip(preds, gts):
        pred = check_mask(pred, "pred", n_classes)
        gt = check_mask(gt, "gt", n_classes)
        check_same_shape(pred, gt, "masks")
        pc = np.bincount(pred.ravel(), minlength=n_classes)
        gc = np.bincount(gt.ravel(), minlength=n_classes)
        agree = pred.ravel() == gt.ravel()
        ic = np.bincount(pred.ravel()[agree], minlength=n_classes)
        inter += ic
        union += pc + gc - ic
    return inter, union


def per_class_iou(preds, gts, n_classes: int) -> np.ndarray:
    """Per-class dataset IoU; classes absent from both sides are NaN."""
    inter, union = intersection_union(preds, gts, n_classes)
    out = np.full(n_classes, np.nan)
    present = union > 0
    out[present] = inter[present] / union[present]
    return out


def miou(preds, gts, n_classes: int) -> float:
    """Mean of per-class dataset IoU, skipping classes absent from both sides."""
    ious = per_class_iou(preds, gts, n_classes)
    return float(np.nanmean(ious))


def pixel_accuracy(pred: np.ndarray, gt: np.ndarray) -> float:
    """Fraction of pixels whose predicted class matches the ground truth."""
    pred = check_mask(pred, "pred")
    gt = check_mask(gt, "gt")
    check_same_shape(pred, gt, "masks")
    return float((pred == gt).mean())


def format_metrics(preds, gts, n_classes: int) -> str:
    """Fixed-format report: one `class_<c>_iou=` line per class, then `miou=`."""
    ious = per_class_iou(preds, gts, n_classes)
    lines = [
        f"class_{c}_iou={ious[c]:.6f}"
        for c in range(n_classes)
        if not np.isnan(ious[c])
    ]
    lines.append(f"miou={np.nanmean(ious):.6f}")
    return "\n".join(lines)
