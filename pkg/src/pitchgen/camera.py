"""Pinhole camera: projection, frustum clipping, ground homography, pose sampling.

Camera frame: +z = optical axis (forward), +x = image right, +y = image down.
Orientation is composed as pan (about world z), then tilt (downward, about the
panned right axis), then roll (about the optical axis). With all angles zero
the camera looks along world +y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

DEFAULT_RESOLUTION = (1920, 1080)

FIXED_BROADCAST = "FIXED_BROADCAST"
MULTI_BROADCAST = "MULTI_BROADCAST"


class DegeneratePoseError(ValueError):
    """Optical axis parallel to the ground plane; no finite homography."""


class SamplingExhaustedError(RuntimeError):
    """Camera rejection sampling failed to find a valid pose."""


@dataclass(frozen=True)
class CameraParams:
    position: tuple[float, float, float]
    pan: float
    tilt: float
    roll: float
    focal_px: float
    principal_point: tuple[float, float]
    resolution: tuple[int, int] = DEFAULT_RESOLUTION
    near_plane: float = 0.1

    def __post_init__(self):
        if self.focal_px <= 0:
            raise ValueError("focal_px must be positive")
        if self.near_plane <= 0:
            raise ValueError("near_plane must be positive")
        cx, cy = self.principal_point
        w, h = self.resolution
        if not (0 <= cx <= w and 0 <= cy <= h):
            raise ValueError("principal_point must lie within the resolution")

    def to_dict(self) -> dict:
        return {
            "position": list(self.position),
            "pan": self.pan,
            "tilt": self.tilt,
            "roll": self.roll,
            "focal_px": self.focal_px,
            "principal_point": list(self.principal_point),
            "resolution": list(self.resolution),
            "near_plane": self.near_plane,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CameraParams":
        return cls(
            position=tuple(d["position"]),
            pan=d["pan"],
            tilt=d["tilt"],
            roll=d["roll"],
            focal_px=d["focal_px"],
            principal_point=tuple(d["principal_point"]),
            resolution=tuple(d["resolution"]),
            near_plane=d["near_plane"],
        )


def rotation_matrix(pan: float, tilt: float, roll: float) -> np.ndarray:
    """World-to-camera rotation; rows are the camera right/down/forward axes."""
    cp, sp = math.cos(pan), math.sin(pan)
    right = np.array([cp, sp, 0.0])
    forward = np.array([-sp, cp, 0.0])
    down = np.array([0.0, 0.0, -1.0])
    ct, st = math.cos(tilt), math.sin(tilt)
    forward, down = ct * forward + st * down, ct * down - st * forward
    cr, sr = math.cos(roll), math.sin(roll)
    right, down = cr * right + sr * down, cr * down - sr * right
    return np.stack([right, down, forward])


def intrinsic_matrix(cam: CameraParams) -> np.ndarray:
    cx, cy = cam.principal_point
    f = cam.focal_px
    return np.array([[f, 0.0, cx], [0.0, f, cy], [0.0, 0.0, 1.0]])


def camera_coords(cam: CameraParams, points: np.ndarray) -> np.ndarray:
    """World points (n, 3) -> camera-frame coordinates (n, 3)."""
    R = rotation_matrix(cam.pan, cam.tilt, cam.roll)
    return (np.atleast_2d(points) - np.asarray(cam.position)) @ R.T


def project_point(cam: CameraParams, p) -> tuple[float, float] | None:
    """Project a world point to continuous pixel coordinates.

    Returns None when the point is at or behind the near plane. The result
    may lie outside the image rectangle; visibility is the caller's concern.
    """
    c = camera_coords(cam, np.asarray(p, dtype=float))[0]
    if c[2] <= cam.near_plane:
        return None
    cx, cy = cam.principal_point
    return (cx + cam.focal_px * c[0] / c[2], cy + cam.focal_px * c[1] / c[2])


def project_points(cam: CameraParams, points: np.ndarray):
    """Vectorized projection: returns (uv (n,2), depth (n,), valid (n,))."""
    c = camera_coords(cam, points)
    z = c[:, 2]
    valid = z > cam.near_plane
    zs = np.where(valid, z, 1.0)
    cx, cy = cam.principal_point
    uv = np.stack([cx + cam.focal_px * c[:, 0] / zs, cy + cam.focal_px * c[:, 1] / zs], axis=1)
    return uv, z, valid


def ground_homography(cam: CameraParams) -> np.ndarray:
    """3x3 map from homogeneous ground coordinates (x, y, 1) to pixels.

    Raises DegeneratePoseError when the optical axis is parallel to the
    ground plane (no ground point projects finitely near the axis).
    """
    R = rotation_matrix(cam.pan, cam.tilt, cam.roll)
    if abs(R[2, 2]) < 1e-12 and abs(cam.position[2]) < 1e-12:
        raise DegeneratePoseError("camera lies in the ground plane")
    if abs(math.sin(cam.tilt)) < 1e-12:
        raise DegeneratePoseError("optical axis parallel to the ground plane")
    M = intrinsic_matrix(cam) @ R
    t = -(intrinsic_matrix(cam) @ R @ np.asarray(cam.position))
    H = np.column_stack([M[:, 0], M[:, 1], t])
    return H


def apply_homography(H: np.ndarray, xy: np.ndarray) -> np.ndarray:
    """Apply H to ground points (n, 2), dehomogenize to pixels (n, 2)."""
    xy = np.atleast_2d(xy)
    ph = np.column_stack([xy, np.ones(len(xy))]) @ H.T
    return ph[:, :2] / ph[:, 2:3]


def clip_segment(cam: CameraParams, p0, p1, margin: float = 0.0):
    """Maximal sub-segment projecting in front of the near plane and inside
    the image rectangle expanded by `margin` pixels.

    Returns (q0, q1) world points, or None when no such sub-segment exists.
    Clipping is solved exactly in the segment parameter: each frustum face is
    a linear constraint on camera coordinates, which are linear in t.
    """
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    if np.array_equal(p0, p1):
        raise ValueError("segment endpoints must be distinct")
    c = camera_coords(cam, np.stack([p0, p1]))
    c0, c1 = c[0], c[1]
    w, h = cam.resolution
    cx, cy = cam.principal_point
    f = cam.focal_px
    lo, hi = 0.0, 1.0

    def clip_halfspace(a0, a1):
        # keep a(t) = a0 + t*(a1 - a0) >= 0
        nonlocal lo, hi
        da = a1 - a0
        if abs(da) < 1e-300:
            if a0 < 0:
                lo, hi = 1.0, 0.0
            return
        t = -a0 / da
        if da > 0:
            lo = max(lo, t)
        else:
            hi = min(hi, t)

    # in front of the near plane: z - near >= 0
    clip_halfspace(c0[2] - cam.near_plane, c1[2] - cam.near_plane)
    if lo > hi:
        return None
    # image-rectangle constraints, valid for z > 0:
    #   u >= -m   <=>  f*x + (cx + m)*z >= 0
    #   u <= w+m  <=>  -f*x + (w + m - cx)*z >= 0   (same pattern for v)
    clip_halfspace(f * c0[0] + (cx + margin) * c0[2], f * c1[0] + (cx + margin) * c1[2])
    clip_halfspace(-f * c0[0] + (w + margin - cx) * c0[2], -f * c1[0] + (w + margin - cx) * c1[2])
    clip_halfspace(f * c0[1] + (cy + margin) * c0[2], f * c1[1] + (cy + margin) * c1[2])
    clip_halfspace(-f * c0[1] + (h + margin - cy) * c0[2], -f * c1[1] + (h + margin - cy) * c1[2])
    if lo > hi:
        return None
    return (p0 + lo * (p1 - p0), p0 + hi * (p1 - p0))


def aim_angles(position, target) -> tuple[float, float]:
    """Pan/tilt that point the optical axis from position at target."""
    g = np.asarray(target, dtype=float) - np.asarray(position, dtype=float)
    pan = math.atan2(-g[0], g[1])
    tilt = math.atan2(-g[2], math.hypot(g[0], g[1]))
    return pan, tilt


def pitch_coverage(cam: CameraParams, length: float, width: float, grid: int = 40) -> float:
    """Fraction of the pitch rectangle area that projects inside the frame."""
    xs = np.linspace(-length / 2, length / 2, grid)
    ys = np.linspace(-width / 2, width / 2, grid)
    X, Y = np.meshgrid(xs, ys)
    pts = np.column_stack([X.ravel(), Y.ravel(), np.zeros(X.size)])
    uv, _, valid = project_points(cam, pts)
    w, h = cam.resolution
    inside = valid & (uv[:, 0] >= 0) & (uv[:, 0] <= w) & (uv[:, 1] >= 0) & (uv[:, 1] <= h)
    return float(inside.mean())


@dataclass(frozen=True)
class CameraRanges:
    """MULTI_BROADCAST sampling ranges (broadcast-plausible defaults)."""

    x: tuple[float, float] = (-30.0, 30.0)
    y: tuple[float, float] = (-55.0, -40.0)
    z: tuple[float, float] = (10.0, 30.0)
    focal_px: tuple[float, float] = (900.0, 4000.0)
    roll_deg: tuple[float, float] = (-2.0, 2.0)
    min_coverage: float = 0.6
    max_retries: int = 64


# Fixed main camera behind "Side line bottom" at the halfway line, aimed at
# the pitch center. focal 1150 px keeps >= 60% of the pitch in frame at
# 1920x1080 (wider values fail the coverage predicate from this position).
FIXED_POSITION = (0.0, -45.0, 18.0)
FIXED_FOCAL = 1150.0


def fixed_broadcast_camera(resolution=DEFAULT_RESOLUTION) -> CameraParams:
    pan, tilt = aim_angles(FIXED_POSITION, (0.0, 0.0, 0.0))
    w, h = resolution
    # focal ranges are stated at 1920 px width; scale so the field of view is
    # resolution-invariant
    return CameraParams(
        position=FIXED_POSITION,
        pan=pan,
        tilt=tilt,
        roll=0.0,
        focal_px=FIXED_FOCAL * (w / DEFAULT_RESOLUTION[0]),
        principal_point=(w / 2.0, h / 2.0),
        resolution=tuple(resolution),
    )


def sample_camera(
    rng: np.random.Generator,
    preset: str,
    ranges: CameraRanges = CameraRanges(),
    resolution=DEFAULT_RESOLUTION,
    pitch_length: float = 105.0,
    pitch_width: float = 68.0,
) -> CameraParams:
    """Sample a camera pose for the given preset.

    FIXED_BROADCAST ignores the rng and returns the deterministic main-camera
    pose. MULTI_BROADCAST draws pose/intrinsics from `ranges`, aiming at a
    uniform point inside the pitch, and rejects poses with less than
    `min_coverage` of the pitch area in frame.
    """
    if preset == FIXED_BROADCAST:
        return fixed_broadcast_camera(resolution)
    if preset != MULTI_BROADCAST:
        raise ValueError(f"unknown camera preset: {preset!r}")
    w, h = resolution
    for _ in range(ranges.max_retries):
        pos = (
            rng.uniform(*ranges.x),
            rng.uniform(*ranges.y),
            rng.uniform(*ranges.z),
        )
        target = (
            rng.uniform(-pitch_length / 2, pitch_length / 2),
            rng.uniform(-pitch_width / 2, pitch_width / 2),
            0.0,
        )
        lo, hi = ranges.focal_px
        focal = math.exp(rng.uniform(math.log(lo), math.log(hi))) * (w / DEFAULT_RESOLUTION[0])
        roll = math.radians(rng.uniform(*ranges.roll_deg))
        pan, tilt = aim_angles(pos, target)
        cam = CameraParams(
            position=pos,
            pan=pan,
            tilt=tilt,
            roll=roll,
            focal_px=focal,
            principal_point=(w / 2.0, h / 2.0),
            resolution=tuple(resolution),
        )
        if pitch_coverage(cam, pitch_length, pitch_width) >= ranges.min_coverage:
            return cam
    raise SamplingExhaustedError(
        f"no pose satisfied the coverage predicate in {ranges.max_retries} draws"
    )
