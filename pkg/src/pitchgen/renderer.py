"""Rasterizes a SceneSpec into a full-HD color image and a per-class mask.

All color blending happens in linear light; the final image is encoded with
a 2.2 gamma. Paint order: background (sky/stands, audience speckle) -> grass
(base color x texture noise x mowing stripes) -> lighting tint multiply ->
real field lines -> fake lines -> players.

The mask rasterizes line geometry only, with the exact projection and stroke
widths used for the image, hard labels, higher class id winning overlaps.
Fake lines never enter the training mask; they go to an optional diagnostic
mask (id 27) where real lines still win.
"""

from __future__ import annotations

import math

import cv2
import numpy as np

from .camera import CameraParams, camera_coords, clip_segment, ground_homography, project_point
from .geometry import CLASS_TO_ID, FAKE_LINE_ID, LINE_CLASSES, Arc, FieldModel, Segment
from .noise import fbm, value_noise
from .randomization import SceneSpec, fake_line_endpoints
from .rasterize import fill_capsule, stroke_image, stroke_mask

LINE_COLOR = (1.0, 1.0, 1.0)
STROKE_MIN_PX = 1.0
STROKE_MAX_PX = 12.0
RENDER_SPACING_M = 0.8  # polyline flattening step; chord error is sub-pixel
PLAYER_HEIGHT_M = 1.8
PLAYER_RADIUS_M = 0.25
GRASS_CHANNEL_CAP = 0.64  # keeps white lines >= 1.5x grass luminance

# (scale px, octaves, amplitude) for the five grass texture presets
TEXTURE_PRESETS = (
    (160.0, 3, 0.10),
    (110.0, 3, 0.14),
    (220.0, 4, 0.12),
    (90.0, 2, 0.08),
    (300.0, 4, 0.16),
)

SKY_TOP = (0.30, 0.42, 0.60)
SKY_HORIZON = (0.55, 0.60, 0.68)
STAND_BASE = (0.22, 0.21, 0.22)
STAND_BAND_FRACTION = 0.30  # of image height, measured up from the horizon


class DimensionMismatchError(ValueError):
    pass


def _check(scene: SceneSpec, cam: CameraParams) -> None:
    if scene.camera != cam:
        raise DimensionMismatchError("scene.camera and cam disagree")


def gamma_encode(linear: np.ndarray) -> np.ndarray:
    out = np.clip(linear, 0.0, 1.0) ** np.float32(1.0 / 2.2)
    return (out * 255.0 + 0.5).astype(np.uint8)


def _ground_denominator(cam: CameraParams):
    """Per-pixel 1/depth of the ground-plane intersection (<= 0 means sky).

    Third row of the inverse ground homography evaluated at pixel centers.
    """
    w, h = cam.resolution
    Hinv = np.linalg.inv(ground_homography(cam))
    us = np.arange(w, dtype=np.float32) + 0.5
    vs = np.arange(h, dtype=np.float32) + 0.5
    a, b, c = Hinv[2]
    denom = a * us[None, :] + b * vs[:, None] + c
    return Hinv, denom, us, vs


def _ground_coords(Hinv, denom, us, vs):
    """World (X, Y) of the ground point under each pixel (valid where denom > 0)."""
    safe = np.where(np.abs(denom) < 1e-12, 1e-12, denom)
    X = (Hinv[0, 0] * us[None, :] + Hinv[0, 1] * vs[:, None] + Hinv[0, 2]) / safe
    Y = (Hinv[1, 0] * us[None, :] + Hinv[1, 1] * vs[:, None] + Hinv[1, 2]) / safe
    return X.astype(np.float32), Y.astype(np.float32)


def _paint_background(img, scene: SceneSpec, denom, us, vs, h):
    """Sky gradient and stand band (with audience speckle) above the horizon."""
    sky = denom <= 0
    if not sky.any():
        return
    Hh, Ww = img.shape[:2]
    # per-column horizon row: denom is linear in v, so solve a*u + b*v + c = 0
    rows = np.broadcast_to(vs[:, None], (Hh, Ww))
    horizon = np.full(Ww, Hh, dtype=np.float32)
    ground_rows = np.where(denom > 0, rows, np.inf)
    horizon = ground_rows.min(axis=0)
    horizon = np.where(np.isfinite(horizon), horizon, np.float32(Hh))
    above = (horizon[None, :] - rows)  # pixels above the horizon, in rows
    band_px = STAND_BAND_FRACTION * Hh
    in_band = sky & (above < band_px)
    # sky gradient: darker toward the top of the frame
    tsky = np.clip(above / np.float32(Hh), 0.0, 1.0)[..., None]
    sky_col = (1 - tsky) * np.asarray(SKY_HORIZON, np.float32) + tsky * np.asarray(SKY_TOP, np.float32)
    img[sky] = sky_col[sky]
    if in_band.any():
        if scene.audience_on:
            # speckle only over the band's row extent, not the full frame
            band_rows = np.nonzero(in_band.any(axis=1))[0]
            r0, r1 = int(band_rows[0]), int(band_rows[-1]) + 1
            u_grid = np.broadcast_to(us[None, :], (r1 - r0, Ww))
            v_grid = rows[r0:r1]
            speck = np.stack(
                [
                    0.12 + 0.55 * value_noise(u_grid / 3.0, v_grid / 3.0, scene.audience_texture_seed),
                    0.12 + 0.45 * value_noise(u_grid / 3.0, v_grid / 3.0, scene.audience_texture_seed + 3),
                    0.12 + 0.55 * value_noise(u_grid / 24.0, v_grid / 24.0, scene.audience_texture_seed + 7),
                ],
                axis=-1,
            )
            sub = in_band[r0:r1]
            img[r0:r1][sub] = speck[sub]
        else:
            img[in_band] = np.asarray(STAND_BASE, np.float32)


def _grass_field(scene: SceneSpec, Hh, Ww, X, Y, ground):
    """Linear-light grass color per pixel over the ground region."""
    base = np.asarray(scene.base_grass_color, np.float32)
    scale, octaves, amp = TEXTURE_PRESETS[scene.grass_texture_preset % len(TEXTURE_PRESETS)]
    # the texture is smooth at `scale`-pixel wavelengths: sample it at quarter
    # resolution and upscale (deterministic bilinear)
    sub = 4
    wq, hq = (Ww + sub - 1) // sub, (Hh + sub - 1) // sub
    us = (np.arange(wq, dtype=np.float32) * sub + 0.5) / np.float32(scale)
    vs = (np.arange(hq, dtype=np.float32) * sub + 0.5) / np.float32(scale)
    tex = fbm(us[None, :], vs[:, None], scene.seed & 0x7FFFFFFF, octaves=octaves)
    tex = cv2.resize(tex, (Ww, Hh), interpolation=cv2.INTER_LINEAR)
    factor = 1.0 + amp * (2.0 * tex - 1.0)
    stripes = scene.stripe_pattern
    if stripes.contrast != 1.0 and X is not None:
        s = X * np.float32(math.cos(stripes.orientation)) + Y * np.float32(math.sin(stripes.orientation))
        # one light + one dark band per period
        band = np.floor(s / np.float32(stripes.period / 2.0)).astype(np.int64) & 1
        c = np.float32(math.sqrt(stripes.contrast))
        factor = factor * np.where(band == 0, c, 1.0 / c)
    grass = base[None, None, :] * factor[..., None]
    return np.minimum(grass, GRASS_CHANNEL_CAP)


def _stroke_width_px(cam: CameraParams, line_width_m: float, depth: float) -> float:
    w = cam.focal_px * line_width_m / max(depth, cam.near_plane)
    return float(np.clip(w, STROKE_MIN_PX, STROKE_MAX_PX))


def _primitive_polyline(field: FieldModel, line_class: str) -> np.ndarray:
    """World-space flattening of a primitive for rendering."""
    shape = field.primitive(line_class).shape
    if isinstance(shape, Segment):
        n = max(1, math.ceil(shape.length / RENDER_SPACING_M))
        ts = np.linspace(0.0, 1.0, n + 1)
        return np.array([shape.point_at(t) for t in ts])
    assert isinstance(shape, Arc)
    n = max(8, math.ceil(shape.length / RENDER_SPACING_M))
    angles = np.linspace(shape.angle_start, shape.angle_end, n + 1)
    return np.array([shape.point_at_angle(a) for a in angles])


def _projected_strokes(cam: CameraParams, world_pts: np.ndarray, line_width_m: float):
    """Clip and project a world polyline; yields (uv0, uv1, width_px) strokes."""
    margin = STROKE_MAX_PX / 2 + 2
    out = []
    for i in range(len(world_pts) - 1):
        clipped = clip_segment(cam, world_pts[i], world_pts[i + 1], margin=margin)
        if clipped is None:
            continue
        q0, q1 = clipped
        a = project_point(cam, q0)
        b = project_point(cam, q1)
        if a is None or b is None:
            continue
        mid = 0.5 * (np.asarray(q0) + np.asarray(q1))
        depth = camera_coords(cam, mid)[0, 2]
        out.append((a, b, _stroke_width_px(cam, line_width_m, depth)))
    return out


def line_strokes(scene: SceneSpec, field: FieldModel, cam: CameraParams):
    """All line strokes for a scene: {class_id: [(uv0, uv1, width_px), ...]}.

    Class id FAKE_LINE_ID holds the fake-line strokes. Shared by image and
    mask rendering so the two stay registered.
    """
    lw = field.dims.line_width
    strokes = {}
    for name in LINE_CLASSES:
        segs = _projected_strokes(cam, _primitive_polyline(field, name), lw)
        if segs:
            strokes[CLASS_TO_ID[name]] = segs
    fake = []
    for p0, p1 in fake_line_endpoints(scene, field):
        if np.allclose(p0, p1):
            continue
        fake.extend(_projected_strokes(cam, np.stack([p0, p1]), lw))
    if fake:
        strokes[FAKE_LINE_ID] = fake
    return strokes


def _draw_players(img, scene: SceneSpec, cam: CameraParams):
    order = []
    for pl in scene.players:
        base = np.array([pl.position[0], pl.position[1], 0.0])
        depth = camera_coords(cam, base)[0, 2]
        if depth > cam.near_plane:
            order.append((depth, pl, base))
    order.sort(key=lambda t: -t[0])  # far to near so near players occlude
    for depth, pl, base in order:
        foot = project_point(cam, base)
        head = project_point(cam, base + np.array([0.0, 0.0, PLAYER_HEIGHT_M]))
        if foot is None or head is None:
            continue
        radius = cam.focal_px * PLAYER_RADIUS_M / depth
        fill_capsule(img, head, foot, radius, pl.jersey_color)


def render_image(scene: SceneSpec, field: FieldModel, cam: CameraParams) -> np.ndarray:
    """Render the color image; returns (H, W, 3) uint8 (gamma-encoded)."""
    _check(scene, cam)
    w, h = cam.resolution
    img = np.zeros((h, w, 3), dtype=np.float32)
    Hinv, denom, us, vs = _ground_denominator(cam)
    ground = denom > 0
    _paint_background(img, scene, denom, us, vs, h)
    need_xy = scene.stripe_pattern.contrast != 1.0
    X = Y = None
    if need_xy:
        X, Y = _ground_coords(Hinv, denom, us, vs)
    grass = _grass_field(scene, h, w, X, Y, ground)
    img[ground] = grass[ground]
    img *= np.asarray(scene.lighting_tint, np.float32)[None, None, :]
    strokes = line_strokes(scene, field, cam)
    for class_id in sorted(strokes):
        for uv0, uv1, width in strokes[class_id]:
            stroke_image(img, [uv0, uv1], width, LINE_COLOR)
    _draw_players(img, scene, cam)
    return gamma_encode(img)


def render_mask(scene: SceneSpec, field: FieldModel, cam: CameraParams, diagnostic: bool = False):
    """Render the training mask (H, W) uint8, ids 0..26.

    With diagnostic=True also returns a second mask where fake-line pixels
    carry id 27 (real lines win overlaps).
    """
    _check(scene, cam)
    w, h = cam.resolution
    mask = np.zeros((h, w), dtype=np.uint8)
    strokes = line_strokes(scene, field, cam)
    for class_id in sorted(k for k in strokes if k != FAKE_LINE_ID):
        for uv0, uv1, width in strokes[class_id]:
            stroke_mask(mask, [uv0, uv1], width, class_id)
    if not diagnostic:
        return mask
    diag = mask.copy()
    if FAKE_LINE_ID in strokes:
        fake = np.zeros_like(mask)
        for uv0, uv1, width in strokes[FAKE_LINE_ID]:
            stroke_mask(fake, [uv0, uv1], width, FAKE_LINE_ID)
        diag = np.where((diag == 0) & (fake > 0), np.uint8(FAKE_LINE_ID), diag)
    return mask, diag
