"""Pixel accuracy and mean IoU over a 27-class confusion matrix."""

from __future__ import annotations

import numpy as np

from .data import NUM_CLASSES


def confusion(pred: np.ndarray, gt: np.ndarray,
              counts: np.ndarray | None = None) -> np.ndarray:
    """Accumulate (gt, pred) counts into a NUM_CLASSES^2 matrix."""
    if counts is None:
        counts = np.zeros((NUM_CLASSES, NUM_CLASSES), dtype=np.int64)
    if pred.shape != gt.shape:
        raise ValueError(f"shape mismatch: {pred.shape} vs {gt.shape}")
    idx = gt.astype(np.int64).ravel() * NUM_CLASSES + pred.astype(np.int64).ravel()
    counts += np.bincount(idx, minlength=NUM_CLASSES**2).reshape(NUM_CLASSES, NUM_CLASSES)
    return counts


def pixel_accuracy(counts: np.ndarray) -> float:
    return float(np.trace(counts)) / float(counts.sum())


def mean_iou(counts: np.ndarray) -> float:
    """Mean TP/(TP+FP+FN) over classes present in pred or gt."""
    tp = np.diag(counts)
    union = counts.sum(axis=0) + counts.sum(axis=1) - tp
    present = union > 0
    return float(np.mean(tp[present] / union[present]))
