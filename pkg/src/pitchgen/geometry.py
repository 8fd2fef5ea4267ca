"""Parametric 3D soccer pitch: named line/arc primitives and point sampling.

World frame: origin at pitch center, x toward the right goal, y toward
"Side line top", z up, units meters. All ground markings live in z = 0;
goal frames extend upward to goal_height.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np

# Canonical class listing order (also the mask id order: 1-based).
LINE_CLASSES = (
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
)

CLASS_TO_ID = {name: i + 1 for i, name in enumerate(LINE_CLASSES)}
FAKE_LINE_ID = 27


class InvalidDimensionsError(ValueError):
    """A FieldDimensions constraint is violated; message names the constraint."""


@dataclass(frozen=True)
class FieldDimensions:
    """Pitch dimensions in meters (defaults: standard broadcast pitch)."""

    length: float = 105.0
    width: float = 68.0
    circle_radius: float = 9.15
    penalty_area_depth: float = 16.5
    penalty_area_width: float = 40.32
    goal_area_depth: float = 5.5
    goal_area_width: float = 18.32
    penalty_spot_distance: float = 11.0
    goal_width: float = 7.32
    goal_height: float = 2.44
    line_width: float = 0.12

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) <= 0:
                raise InvalidDimensionsError(f"{f.name} must be strictly positive")
        if not self.penalty_area_depth < self.length / 2:
            raise InvalidDimensionsError("penalty_area_depth < length/2 violated")
        if not self.goal_area_depth < self.penalty_area_depth:
            raise InvalidDimensionsError("goal_area_depth < penalty_area_depth violated")
        if not self.goal_area_width < self.penalty_area_width:
            raise InvalidDimensionsError("goal_area_width < penalty_area_width violated")
        if not self.penalty_area_width < self.width:
            raise InvalidDimensionsError("penalty_area_width < width violated")
        if not self.penalty_spot_distance < self.penalty_area_depth + self.circle_radius:
            raise InvalidDimensionsError(
                "penalty_spot_distance < penalty_area_depth + circle_radius violated"
            )


@dataclass(frozen=True)
class Segment:
    p0: tuple[float, float, float]
    p1: tuple[float, float, float]

    def __post_init__(self):
        if self.p0 == self.p1:
            raise ValueError("segment endpoints must be distinct")

    @property
    def length(self) -> float:
        return math.dist(self.p0, self.p1)

    def point_at(self, t: float) -> np.ndarray:
        a, b = np.asarray(self.p0), np.asarray(self.p1)
        return a + t * (b - a)


@dataclass(frozen=True)
class Arc:
    """Circular arc in the z = 0 plane, angles in radians, CCW from +x."""

    center: tuple[float, float, float]
    radius: float
    angle_start: float
    angle_end: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("arc radius must be positive")
        if self.angle_end <= self.angle_start:
            raise ValueError("arc must span a positive angle")

    @property
    def length(self) -> float:
        return self.radius * (self.angle_end - self.angle_start)

    def point_at_angle(self, a: float) -> np.ndarray:
        cx, cy, cz = self.center
        return np.array([cx + self.radius * math.cos(a), cy + self.radius * math.sin(a), cz])


@dataclass(frozen=True)
class FieldPrimitive:
    line_class: str
    shape: Segment | Arc


@dataclass(frozen=True)
class FieldModel:
    dims: FieldDimensions
    primitives: dict[str, FieldPrimitive] = field(repr=False)

    def primitive(self, line_class: str) -> FieldPrimitive:
        return self.primitives[line_class]


def _penalty_arc(dims: FieldDimensions, side: str) -> Arc:
    """Penalty arc: circle at the penalty spot clipped outside the penalty area.

    For the left spot at x = -L/2 + spot_dist, the visible arc is the part with
    x > -L/2 + penalty_area_depth (outside the big rectangle, toward midfield).
    """
    half_l = dims.length / 2
    r = dims.circle_radius
    if side == "left":
        cx = -half_l + dims.penalty_spot_distance
        x_edge = -half_l + dims.penalty_area_depth
        # arc points with cx + r*cos(a) >= x_edge  ->  cos(a) >= (x_edge-cx)/r
        c = (x_edge - cx) / r
        half = math.acos(max(-1.0, min(1.0, c)))
        return Arc((cx, 0.0, 0.0), r, -half, half)
    else:
        cx = half_l - dims.penalty_spot_distance
        x_edge = half_l - dims.penalty_area_depth
        c = (cx - x_edge) / r
        half = math.acos(max(-1.0, min(1.0, c)))
        return Arc((cx, 0.0, 0.0), r, math.pi - half, math.pi + half)


def build_field_model(dims: FieldDimensions) -> FieldModel:
    """Construct all 26 named primitives from the dimensions."""
    L, W = dims.length, dims.width
    hl, hw = L / 2, W / 2
    pd, pw = dims.penalty_area_depth, dims.penalty_area_width / 2
    gd, gw = dims.goal_area_depth, dims.goal_area_width / 2
    gmw, gh = dims.goal_width / 2, dims.goal_height

    prims: dict[str, Segment | Arc] = {
        # touchlines / goal lines
        "Side line bottom": Segment((-hl, -hw, 0), (hl, -hw, 0)),
        "Side line top": Segment((-hl, hw, 0), (hl, hw, 0)),
        "Side line left": Segment((-hl, -hw, 0), (-hl, hw, 0)),
        "Side line right": Segment((hl, -hw, 0), (hl, hw, 0)),
        "Middle line": Segment((0, -hw, 0), (0, hw, 0)),
        # penalty areas ("main" = edge parallel to the goal line)
        "Big rect. left main": Segment((-hl + pd, -pw, 0), (-hl + pd, pw, 0)),
        "Big rect. left top": Segment((-hl, pw, 0), (-hl + pd, pw, 0)),
        "Big rect. left bottom": Segment((-hl, -pw, 0), (-hl + pd, -pw, 0)),
        "Big rect. right main": Segment((hl - pd, -pw, 0), (hl - pd, pw, 0)),
        "Big rect. right top": Segment((hl - pd, pw, 0), (hl, pw, 0)),
        "Big rect. right bottom": Segment((hl - pd, -pw, 0), (hl, -pw, 0)),
        # goal areas
        "Small rect. left main": Segment((-hl + gd, -gw, 0), (-hl + gd, gw, 0)),
        "Small rect. left top": Segment((-hl, gw, 0), (-hl + gd, gw, 0)),
        "Small rect. left bottom": Segment((-hl, -gw, 0), (-hl + gd, -gw, 0)),
        "Small rect. right main": Segment((hl - gd, -gw, 0), (hl - gd, gw, 0)),
        "Small rect. right top": Segment((hl - gd, gw, 0), (hl, gw, 0)),
        "Small rect. right bottom": Segment((hl - gd, -gw, 0), (hl, -gw, 0)),
        # circles
        "Circle central": Arc((0, 0, 0), dims.circle_radius, 0.0, 2 * math.pi),
        "Circle left": _penalty_arc(dims, "left"),
        "Circle right": _penalty_arc(dims, "right"),
        # goal frames (vertical posts + crossbar at the goal-line plane)
        "Goal left post left": Segment((-hl, gmw, 0), (-hl, gmw, gh)),
        "Goal left post right": Segment((-hl, -gmw, 0), (-hl, -gmw, gh)),
        "Goal left crossbar": Segment((-hl, -gmw, gh), (-hl, gmw, gh)),
        "Goal right post left": Segment((hl, -gmw, 0), (hl, -gmw, gh)),
        "Goal right post right": Segment((hl, gmw, 0), (hl, gmw, gh)),
        "Goal right crossbar": Segment((hl, -gmw, gh), (hl, gmw, gh)),
    }
    assert set(prims) == set(LINE_CLASSES)
    return FieldModel(dims, {k: FieldPrimitive(k, v) for k, v in prims.items()})


def sample_primitive_points(model: FieldModel, line_class: str, spacing: float) -> np.ndarray:
    """Points along a primitive at arc-length intervals <= spacing.

    Segments are ordered p0 -> p1 (both endpoints included); arcs by
    increasing angle. Returns an (n, 3) array of world points.
    """
    if spacing <= 0:
        raise ValueError("spacing must be positive")
    shape = model.primitive(line_class).shape
    if isinstance(shape, Segment):
        n = max(1, math.ceil(shape.length / spacing))
        ts = np.linspace(0.0, 1.0, n + 1)
        return np.array([shape.point_at(t) for t in ts])
    n = max(1, math.ceil(shape.length / spacing))
    angles = np.linspace(shape.angle_start, shape.angle_end, n + 1)
    return np.array([shape.point_at_angle(a) for a in angles])


def perimeter_point(model: FieldModel, t: float) -> np.ndarray:
    """Point on the pitch boundary rectangle at arc-length fraction t in [0, 1).

    Starts at corner (-length/2, -width/2, 0) and proceeds counter-clockwise
    as seen from +z.
    """
    if not 0.0 <= t < 1.0:
        raise ValueError("t must satisfy 0 <= t < 1")
    L, W = model.dims.length, model.dims.width
    hl, hw = L / 2, W / 2
    s = t * 2 * (L + W)  # arc length from the start corner
    if s < L:
        return np.array([-hl + s, -hw, 0.0])
    s -= L
    if s < W:
        return np.array([hl, -hw + s, 0.0])
    s -= W
    if s < L:
        return np.array([hl - s, hw, 0.0])
    s -= L
    return np.array([-hl, hw - s, 0.0])


def on_perimeter(model: FieldModel, p, tol: float = 1e-9) -> bool:
    """True if p lies on the pitch boundary rectangle within tol meters."""
    x, y = float(p[0]), float(p[1])
    hl, hw = model.dims.length / 2, model.dims.width / 2
    on_x = abs(abs(x) - hl) <= tol and -hw - tol <= y <= hw + tol
    on_y = abs(abs(y) - hw) <= tol and -hl - tol <= x <= hl + tol
    return on_x or on_y
