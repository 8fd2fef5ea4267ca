import numpy as np
import pytest

from pitchgen.metrics import (
    NUM_EVAL_CLASSES,
    ConfusionTally,
    EmptyTallyError,
    accumulate,
    mean_iou,
    per_class_iou,
    pixel_accuracy,
)


def reference_confusion(pred, gt):
    """Per-pixel loop, the slow obvious version."""
    m = np.zeros((NUM_EVAL_CLASSES, NUM_EVAL_CLASSES), dtype=np.int64)
    for p, g in zip(pred.ravel(), gt.ravel()):
        m[g, p] += 1
    return m


def reference_iou(matrix, c):
    tp = matrix[c, c]
    union = matrix[c, :].sum() + matrix[:, c].sum() - tp
    return None if union == 0 else tp / union


def tally_of(pred, gt):
    return accumulate(ConfusionTally(), pred, gt)


class TestConfusion:
    def test_two_by_two_example(self):
        pred = np.array([[0, 1], [0, 1]], dtype=np.uint8)
        gt = np.array([[0, 1], [1, 1]], dtype=np.uint8)
        tally = tally_of(pred, gt)
        assert tally.counts[0, 0] == 1
        assert tally.counts[1, 1] == 2
        assert tally.counts[1, 0] == 1
        assert tally.total == 4
        assert pixel_accuracy(tally) == pytest.approx(0.75)

    def test_matches_reference_on_random_pairs(self, rng):
        tally = ConfusionTally()
        ref = np.zeros((NUM_EVAL_CLASSES, NUM_EVAL_CLASSES), dtype=np.int64)
        for _ in range(50):
            pred = rng.integers(0, NUM_EVAL_CLASSES, size=(8, 8), dtype=np.uint8)
            gt = rng.integers(0, NUM_EVAL_CLASSES, size=(8, 8), dtype=np.uint8)
            tally = accumulate(tally, pred, gt)
            ref += reference_confusion(pred, gt)
        assert (tally.counts == ref).all()

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError, match="mismatch"):
            tally_of(np.zeros((2, 2), np.uint8), np.zeros((2, 3), np.uint8))

    def test_label_out_of_range_rejected(self):
        bad = np.full((2, 2), NUM_EVAL_CLASSES, dtype=np.uint8)
        with pytest.raises(ValueError, match="out of range"):
            tally_of(bad, np.zeros((2, 2), np.uint8))

    def test_merge_equals_joint_accumulation(self, rng):
        a, b, joint = ConfusionTally(), ConfusionTally(), ConfusionTally()
        for i in range(10):
            pred = rng.integers(0, 27, size=(4, 4), dtype=np.uint8)
            gt = rng.integers(0, 27, size=(4, 4), dtype=np.uint8)
            if i % 2:
                a = accumulate(a, pred, gt)
            else:
                b = accumulate(b, pred, gt)
            joint = accumulate(joint, pred, gt)
        assert a.merge(b) == joint

    def test_permutation_covariance(self, rng):
        pred = rng.integers(0, 27, size=(16, 16), dtype=np.uint8)
        gt = rng.integers(0, 27, size=(16, 16), dtype=np.uint8)
        perm = rng.permutation(NUM_EVAL_CLASSES).astype(np.uint8)
        t1 = tally_of(pred, gt)
        t2 = tally_of(perm[pred], perm[gt])
        inv = np.argsort(perm)
        # t2[perm[g], perm[p]] == t1[g, p]
        assert (t2.counts == t1.counts[np.ix_(inv, inv)]).all()
        assert pixel_accuracy(t1) == pixel_accuracy(t2)
        assert mean_iou(t1) == pytest.approx(mean_iou(t2))


class TestScores:
    def test_empty_tally_raises(self):
        with pytest.raises(EmptyTallyError):
            pixel_accuracy(ConfusionTally())
        with pytest.raises(EmptyTallyError):
            mean_iou(ConfusionTally())

    def test_perfect_prediction(self, rng):
        gt = rng.integers(0, 27, size=(32, 32), dtype=np.uint8)
        tally = tally_of(gt, gt)
        assert pixel_accuracy(tally) == 1.0
        assert mean_iou(tally) == 1.0

    def test_iou_skips_absent_classes(self):
        # only classes 0 and 3 appear anywhere
        pred = np.array([[0, 3], [3, 3]], dtype=np.uint8)
        gt = np.array([[0, 0], [3, 3]], dtype=np.uint8)
        ious = per_class_iou(tally_of(pred, gt))
        assert set(ious) == {0, 3}
        # class 0: tp=1, union=2; class 3: tp=2, union=3
        assert ious[0] == pytest.approx(0.5)
        assert ious[3] == pytest.approx(2 / 3)
        assert mean_iou(tally_of(pred, gt)) == pytest.approx((0.5 + 2 / 3) / 2)

    def test_iou_matches_reference(self, rng):
        pred = rng.integers(0, 27, size=(64, 64), dtype=np.uint8)
        gt = rng.integers(0, 27, size=(64, 64), dtype=np.uint8)
        tally = tally_of(pred, gt)
        ious = per_class_iou(tally)
        for c in range(NUM_EVAL_CLASSES):
            assert ious.get(c) == pytest.approx(reference_iou(tally.counts, c))

    def test_background_exclusion(self, rng):
        pred = rng.integers(0, 27, size=(64, 64), dtype=np.uint8)
        gt = rng.integers(0, 27, size=(64, 64), dtype=np.uint8)
        tally = tally_of(pred, gt)
        fg = [v for c, v in per_class_iou(tally).items() if c != 0]
        assert mean_iou(tally, include_background=False) == pytest.approx(sum(fg) / len(fg))
