"""Segmentation scoring: confusion tally, pixel accuracy, mean IoU.

Class ids 0..26 (background + the 26 line classes); the fake-line diagnostic
id is excluded from evaluation.
"""

from __future__ import annotations

import numpy as np

NUM_EVAL_CLASSES = 27  # background + 26 line classes


class EmptyTallyError(ValueError):
    pass


class ConfusionTally:
    """Count matrix indexed (ground truth, prediction); mergeable."""

    def __init__(self, counts: np.ndarray | None = None):
        if counts is None:
            counts = np.zeros((NUM_EVAL_CLASSES, NUM_EVAL_CLASSES), dtype=np.int64)
        counts = np.asarray(counts, dtype=np.int64)
        if counts.shape != (NUM_EVAL_CLASSES, NUM_EVAL_CLASSES) or (counts < 0).any():
            raise ValueError("counts must be a nonnegative 27x27 matrix")
        self.counts = counts

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def merge(self, other: "ConfusionTally") -> "ConfusionTally":
        return ConfusionTally(self.counts + other.counts)

    def __eq__(self, other):
        return isinstance(other, ConfusionTally) and np.array_equal(self.counts, other.counts)


def accumulate(tally: ConfusionTally, pred: np.ndarray, gt: np.ndarray) -> ConfusionTally:
    """Add one count per pixel at (gt label, pred label); returns a new tally."""
    pred = np.asarray(pred)
    gt = np.asarray(gt)
    if pred.shape != gt.shape:
        raise ValueError(f"dimension mismatch: pred {pred.shape} vs gt {gt.shape}")
    if pred.max(initial=0) >= NUM_EVAL_CLASSES or gt.max(initial=0) >= NUM_EVAL_CLASSES:
        raise ValueError("label out of range (must be <= 26)")
    idx = gt.astype(np.int64).ravel() * NUM_EVAL_CLASSES + pred.astype(np.int64).ravel()
    add = np.bincount(idx, minlength=NUM_EVAL_CLASSES**2).reshape(NUM_EVAL_CLASSES, NUM_EVAL_CLASSES)
    return ConfusionTally(tally.counts + add)


def pixel_accuracy(tally: ConfusionTally) -> float:
    """Fraction of pixels whose predicted class equals ground truth."""
    if tally.total == 0:
        raise EmptyTallyError("tally is empty")
    return float(np.trace(tally.counts)) / tally.total


def per_class_iou(tally: ConfusionTally) -> dict[int, float]:
    """IoU per class id, skipping classes absent from both pred and gt."""
    c = tally.counts
    tp = np.diag(c)
    fp = c.sum(axis=0) - tp
    fn = c.sum(axis=1) - tp
    union = tp + fp + fn
    return {i: float(tp[i]) / float(union[i]) for i in range(NUM_EVAL_CLASSES) if union[i] > 0}


def mean_iou(tally: ConfusionTally, include_background: bool = True) -> float:
    """Mean over present classes of TP / (TP + FP + FN)."""
    if tally.total == 0:
        raise EmptyTallyError("tally is empty")
    ious = per_class_iou(tally)
    if not include_background:
        ious.pop(0, None)
    if not ious:
        raise EmptyTallyError("no class present in pred or gt")
    return float(np.mean(list(ious.values())))
