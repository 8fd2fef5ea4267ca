"""Dataset loading: images paired with line-keypoint JSON annotations.

The on-disk contract: an annotation file maps class names to lists of
{"x", "y"} points normalized to [0, 1]. Training masks are rasterized from
those polylines (configurable stroke width, 4 px default). Two layouts are
accepted: a generator output root (images/ + annotations/ subdirectories)
or a flat directory of image/JSON pairs sharing basenames.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

import cv2
import numpy as np
import torch
from torch.utils.data import Dataset

log = logging.getLogger(__name__)

LINE_CLASSES = [
    "Big rect. left bottom",
    "Big rect. left main",
    "Big rect. left top",
    "Big rect. right bottom",
    "Big rect. right main",
    "Big rect. right top",
    "Circle central",
    "Circle left",
    "Circle right",
    "Goal left crossbar",
    "Goal left post left",
    "Goal left post right",
    "Goal right crossbar",
    "Goal right post left",
    "Goal right post right",
    "Middle line",
    "Side line bottom",
    "Side line left",
    "Side line right",
    "Side line top",
    "Small rect. left bottom",
    "Small rect. left main",
    "Small rect. left top",
    "Small rect. right bottom",
    "Small rect. right main",
    "Small rect. right top",
]
CLASS_TO_ID = {name: i + 1 for i, name in enumerate(LINE_CLASSES)}
NUM_CLASSES = len(LINE_CLASSES) + 1  # + background


class DatasetFormatError(ValueError):
    pass


def parse_annotation_file(path) -> dict:
    """Parse one annotation JSON file; errors carry the file name."""
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise DatasetFormatError(f"{path}: {e}") from e
    if not isinstance(raw, dict):
        raise DatasetFormatError(f"{path}: top level must be an object")
    doc = {}
    for name, pts in raw.items():
        if name not in CLASS_TO_ID:
            raise DatasetFormatError(f"{path}: unknown class {name!r}")
        if not isinstance(pts, list) or len(pts) < 2:
            raise DatasetFormatError(f"{path}: {name}: need >= 2 points")
        out = []
        for i, p in enumerate(pts):
            try:
                x, y = float(p["x"]), float(p["y"])
            except (TypeError, KeyError, ValueError):
                raise DatasetFormatError(f"{path}: {name}: point {i} malformed") from None
            if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
                raise DatasetFormatError(f"{path}: {name}: point {i} out of [0,1]")
            out.append((x, y))
        doc[name] = out
    return doc


def annotation_to_mask(doc: dict, size: tuple[int, int], stroke_width: int = 4) -> np.ndarray:
    """Rasterize polylines to a class-id mask; higher ids overwrite lower."""
    w, h = size
    mask = np.zeros((h, w), dtype=np.uint8)
    for name in LINE_CLASSES:  # ascending id, so later (higher) classes win
        if name not in doc:
            continue
        pts = np.array([[x * w, y * h] for x, y in doc[name]])
        cv2.polylines(mask, [np.round(pts).astype(np.int32)], isClosed=False,
                      color=CLASS_TO_ID[name], thickness=stroke_width)
    return mask


def load_real_annotations(root, lenient: bool = False) -> list[tuple[Path, dict]]:
    """Index of (image path, parsed annotation) pairs under root.

    With lenient=True, unparsable annotation files are skipped with a
    warning instead of aborting the load.
    """
    root = Path(root)
    if (root / "images").is_dir() and (root / "annotations").is_dir():
        pairs = [(p, root / "annotations" / f"{p.stem}.json")
                 for p in sorted((root / "images").glob("*.png"))]
    else:
        pairs = [(p, p.with_suffix(".json"))
                 for p in sorted(root.glob("*.png")) + sorted(root.glob("*.jpg"))]
    index = []
    for image_path, ann_path in pairs:
        if not ann_path.exists():
            if not lenient:
                raise DatasetFormatError(f"{ann_path}: missing annotation for {image_path.name}")
            log.warning("skipping %s: missing annotation", image_path.name)
            continue
        try:
            doc = parse_annotation_file(ann_path)
        except DatasetFormatError as e:
            if not lenient:
                raise
            log.warning("skipping %s: %s", image_path.name, e)
            continue
        index.append((image_path, doc))
    if not index:
        log.warning("no samples found under %s", root)
    return index


class SegmentationDataset(Dataset):
    """(image, mask) pairs; masks rasterized from annotations on the fly."""

    def __init__(self, index: list[tuple[Path, dict]], stroke_width: int = 4):
        self.index = index
        self.stroke_width = stroke_width

    def __len__(self):
        return len(self.index)

    def __getitem__(self, i):
        image_path, doc = self.index[i]
        bgr = cv2.imread(str(image_path), cv2.IMREAD_COLOR)
        if bgr is None:
            raise DatasetFormatError(f"{image_path}: unreadable image")
        rgb = cv2.cvtColor(bgr, cv2.COLOR_BGR2RGB)
        h, w = rgb.shape[:2]
        mask = annotation_to_mask(doc, (w, h), self.stroke_width)
        image = torch.from_numpy(rgb).permute(2, 0, 1).float() / 255.0
        return image, torch.from_numpy(mask).long()
