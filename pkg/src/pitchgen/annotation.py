"""Keypoint-derived line annotations: generate, serialize, parse.

An annotation document maps line-class names to ordered lists of normalized
image points (x = u/width, y = v/height, both in [0, 1]). Only classes with
at least two visible keypoints appear. For arcs split by the frame edge the
visible runs are concatenated in parameter order under the same key (the
schema cannot express multiple runs; consumers re-split by pixel gaps).
"""

from __future__ import annotations

import json
import logging
import math

import numpy as np

from .camera import CameraParams, clip_segment, project_point
from .geometry import LINE_CLASSES, Arc, FieldModel, sample_primitive_points

logger = logging.getLogger(__name__)

DEFAULT_SPACING_M = 1.0
DEFAULT_ARC_STEP_DEG = 5.0


class AnnotationError(ValueError):
    pass


class MalformedDocumentError(AnnotationError):
    pass


class UnknownClassError(AnnotationError):
    pass


class OutOfRangeCoordinateError(AnnotationError):
    pass


def _in_frame(cam: CameraParams, p) -> tuple[float, float] | None:
    uv = project_point(cam, p)
    if uv is None:
        return None
    w, h = cam.resolution
    if 0.0 <= uv[0] <= w and 0.0 <= uv[1] <= h:
        return uv
    return None


def _normalize(uv, cam: CameraParams):
    w, h = cam.resolution
    # clip-boundary points can overshoot by float noise; clamp to the frame
    return (min(max(uv[0] / w, 0.0), 1.0), min(max(uv[1] / h, 0.0), 1.0))


def _visible_runs(cam: CameraParams, points: np.ndarray):
    """Split a keypoint polyline into maximal visible runs of pixel points."""
    runs = []
    current = []
    vis = [_in_frame(cam, p) for p in points]
    for i in range(len(points) - 1):
        a_vis, b_vis = vis[i], vis[i + 1]
        if a_vis and b_vis:
            if not current:
                current.append(a_vis)
            current.append(b_vis)
            continue
        clipped = clip_segment(cam, points[i], points[i + 1])
        if a_vis and not b_vis:
            if not current:
                current.append(a_vis)
            if clipped is not None:
                exit_uv = project_point(cam, clipped[1])
                if exit_uv is not None:
                    current.append(exit_uv)
            runs.append(current)
            current = []
        elif b_vis and not a_vis:
            if current:
                runs.append(current)
            current = []
            if clipped is not None:
                entry_uv = project_point(cam, clipped[0])
                if entry_uv is not None:
                    current.append(entry_uv)
            current.append(b_vis)
        else:
            if current:
                runs.append(current)
                current = []
            if clipped is not None:
                # the segment cuts a frame corner without either keypoint visible
                q0 = project_point(cam, clipped[0])
                q1 = project_point(cam, clipped[1])
                if q0 is not None and q1 is not None:
                    runs.append([q0, q1])
    if current:
        runs.append(current)
    return [r for r in runs if len(r) >= 2]


def generate_keypoints(
    field: FieldModel,
    cam: CameraParams,
    spacing: float = DEFAULT_SPACING_M,
    arc_step_deg: float = DEFAULT_ARC_STEP_DEG,
) -> dict:
    """Sample keypoints along every primitive, clip to frame, project.

    Returns {class name: [(x, y), ...]} with coordinates normalized to [0, 1].
    """
    if spacing <= 0:
        raise ValueError("spacing must be positive")
    doc = {}
    for name in LINE_CLASSES:
        shape = field.primitive(name).shape
        step = spacing
        if isinstance(shape, Arc):
            step = shape.radius * math.radians(arc_step_deg)
        points = sample_primitive_points(field, name, step)
        runs = _visible_runs(cam, points)
        if not runs:
            continue
        merged = [_normalize(uv, cam) for run in runs for uv in run]
        if len(merged) >= 2:
            doc[name] = merged
    return doc


def emit_annotation(doc: dict) -> bytes:
    """Serialize a document to canonical JSON bytes (UTF-8, stable key order)."""
    ordered = {
        name: [{"x": float(x), "y": float(y)} for x, y in doc[name]]
        for name in LINE_CLASSES
        if name in doc
    }
    return json.dumps(ordered, ensure_ascii=False, separators=(", ", ": ")).encode("utf-8")


def parse_annotation(data: bytes, lenient: bool = False) -> dict:
    """Parse and validate annotation bytes.

    Unknown class keys raise UnknownClassError in strict mode and are logged
    and dropped under lenient=True.
    """
    try:
        raw = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise MalformedDocumentError(f"not a valid JSON document: {e}") from e
    if not isinstance(raw, dict):
        raise MalformedDocumentError("top level must be an object")
    doc = {}
    for key, value in raw.items():
        if key not in set(LINE_CLASSES):
            if lenient:
                logger.warning("dropping unknown annotation class %r", key)
                continue
            raise UnknownClassError(f"unknown class name: {key!r}")
        if not isinstance(value, list) or len(value) < 2:
            raise MalformedDocumentError(f"class {key!r} must hold a list of >= 2 points")
        pts = []
        for i, item in enumerate(value):
            if not isinstance(item, dict) or "x" not in item or "y" not in item:
                raise MalformedDocumentError(f"class {key!r} point {i} must be an object with x and y")
            x, y = item["x"], item["y"]
            if not (isinstance(x, (int, float)) and isinstance(y, (int, float))):
                raise MalformedDocumentError(f"class {key!r} point {i} has non-numeric coordinates")
            if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
                raise OutOfRangeCoordinateError(
                    f"class {key!r} point {i} out of range: ({x}, {y})"
                )
            pts.append((float(x), float(y)))
        doc[key] = pts
    return doc
