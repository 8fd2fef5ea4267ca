"""2D stroke rasterization for images (anti-aliased) and masks (hard ids).

Pixel (row i, col j) has its center at continuous coordinates (j + 0.5,
i + 0.5). Strokes are capsules around each polyline segment, which gives
round caps and round joins for free.

Image strokes composite with an elementwise maximum against the coverage-
weighted stroke color. This keeps anti-aliasing on dark backgrounds and makes
stroking idempotent (drawing the same polyline twice changes nothing).
"""

from __future__ import annotations

import numpy as np


def _segment_distance_field(pts0, pts1, x, y):
    """Distance from grid points (x, y) to the segment (pts0, pts1)."""
    ax, ay = pts0
    bx, by = pts1
    dx, dy = bx - ax, by - ay
    denom = dx * dx + dy * dy
    if denom < 1e-12:
        return np.hypot(x - ax, y - ay)
    t = np.clip(((x - ax) * dx + (y - ay) * dy) / denom, 0.0, 1.0)
    return np.hypot(x - (ax + t * dx), y - (ay + t * dy))


def _segment_bbox(p0, p1, radius, w, h):
    x0 = int(np.floor(min(p0[0], p1[0]) - radius - 1))
    x1 = int(np.ceil(max(p0[0], p1[0]) + radius + 1))
    y0 = int(np.floor(min(p0[1], p1[1]) - radius - 1))
    y1 = int(np.ceil(max(p0[1], p1[1]) + radius + 1))
    x0, x1 = max(x0, 0), min(x1, w)
    y0, y1 = max(y0, 0), min(y1, h)
    if x0 >= x1 or y0 >= y1:
        return None
    return x0, x1, y0, y1


def _iter_segments(points, widths):
    points = np.asarray(points, dtype=float)
    if len(points) < 2:
        # degenerate polyline: a single disc
        yield points[0], points[0], float(np.atleast_1d(widths)[0])
        return
    widths = np.broadcast_to(np.atleast_1d(widths), (len(points) - 1,))
    for i in range(len(points) - 1):
        yield points[i], points[i + 1], float(widths[i])


def stroke_image(img: np.ndarray, points, widths, color) -> None:
    """Anti-aliased stroke on a (H, W, 3) float linear-light image, in place.

    `widths` is a scalar or per-segment array of stroke widths in pixels.
    """
    h, w = img.shape[:2]
    color = np.asarray(color, dtype=img.dtype)
    for p0, p1, width in _iter_segments(points, widths):
        r = width / 2.0
        bbox = _segment_bbox(p0, p1, r, w, h)
        if bbox is None:
            continue
        x0, x1, y0, y1 = bbox
        xs = np.arange(x0, x1, dtype=np.float32) + 0.5
        ys = np.arange(y0, y1, dtype=np.float32) + 0.5
        gx, gy = np.meshgrid(xs, ys)
        d = _segment_distance_field(p0, p1, gx, gy)
        alpha = np.clip(0.5 + (r - d), 0.0, 1.0).astype(img.dtype)
        region = img[y0:y1, x0:x1]
        np.maximum(region, alpha[..., None] * color, out=region)


def stroke_mask(mask: np.ndarray, points, widths, class_id: int) -> None:
    """Hard stroke on a (H, W) integer label mask, in place.

    A pixel is labeled iff its center is within width/2 of the polyline.
    On overlap the higher class id wins, independent of draw order.
    """
    h, w = mask.shape
    for p0, p1, width in _iter_segments(points, widths):
        r = width / 2.0
        bbox = _segment_bbox(p0, p1, r, w, h)
        if bbox is None:
            continue
        x0, x1, y0, y1 = bbox
        xs = np.arange(x0, x1, dtype=np.float32) + 0.5
        ys = np.arange(y0, y1, dtype=np.float32) + 0.5
        gx, gy = np.meshgrid(xs, ys)
        d = _segment_distance_field(p0, p1, gx, gy)
        region = mask[y0:y1, x0:x1]
        hit = d <= r
        np.maximum(region, np.where(hit, np.uint8(class_id), region), out=region)


def draw_polyline(target: np.ndarray, points, width_px, style) -> np.ndarray:
    """Stroke a polyline onto an image (H, W, 3 float; style = RGB color) or a
    mask (H, W integer; style = class id). Returns the target."""
    if width_px is None or np.any(np.atleast_1d(width_px) <= 0):
        raise ValueError("width_px must be positive")
    if len(np.atleast_2d(points)) < 1:
        raise ValueError("polyline needs at least one point")
    if target.ndim == 3:
        stroke_image(target, points, width_px, style)
    elif target.ndim == 2:
        stroke_mask(target, points, width_px, int(style))
    else:
        raise ValueError("target must be an image (H,W,3) or mask (H,W)")
    return target


def fill_capsule(img: np.ndarray, p0, p1, radius: float, color) -> None:
    """Filled capsule with an anti-aliased border, over-composited (used for
    players, which must occlude previously drawn strokes)."""
    h, w = img.shape[:2]
    bbox = _segment_bbox(p0, p1, radius, w, h)
    if bbox is None:
        return
    x0, x1, y0, y1 = bbox
    xs = np.arange(x0, x1, dtype=np.float32) + 0.5
    ys = np.arange(y0, y1, dtype=np.float32) + 0.5
    gx, gy = np.meshgrid(xs, ys)
    d = _segment_distance_field(p0, p1, gx, gy)
    alpha = np.clip(0.5 + (radius - d), 0.0, 1.0).astype(img.dtype)[..., None]
    color = np.asarray(color, dtype=img.dtype)
    img[y0:y1, x0:x1] = (1.0 - alpha) * img[y0:y1, x0:x1] + alpha * color
