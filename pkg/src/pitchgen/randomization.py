"""Randomization ladder: variant flag sets and per-frame scene sampling.

Flags: J jersey, A audience, G green shades, P ground pattern, L lighting
tint, C ground color, M multiple cameras, F fake lines. Each dataset variant
enables a strict superset of its predecessor's flags.
"""

from __future__ import annotations

import colorsys
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .camera import (
    DEFAULT_RESOLUTION,
    FIXED_BROADCAST,
    MULTI_BROADCAST,
    CameraParams,
    CameraRanges,
    sample_camera,
)
from .geometry import FieldModel, perimeter_point


class DatasetVariant(Enum):
    JA = "JA"
    JA_G = "JA_G"
    JA_G_P = "JA_G_P"
    JA_G_P_L = "JA_G_P_L"
    JA_G_P_L_CM = "JA_G_P_L_CM"
    SOCCERSYNTH_FIELD = "SOCCERSYNTH_FIELD"


VARIANT_FLAGS = {
    DatasetVariant.JA: frozenset("JA"),
    DatasetVariant.JA_G: frozenset("JAG"),
    DatasetVariant.JA_G_P: frozenset("JAGP"),
    DatasetVariant.JA_G_P_L: frozenset("JAGPL"),
    DatasetVariant.JA_G_P_L_CM: frozenset("JAGPLCM"),
    DatasetVariant.SOCCERSYNTH_FIELD: frozenset("JAGPLCMF"),
}

VARIANT_ORDER = list(DatasetVariant)

# Base grass variety: ten yellow and green linear-RGB colors.
GRASS_PALETTE = (
    (0.060, 0.220, 0.050),
    (0.080, 0.260, 0.065),
    (0.055, 0.190, 0.060),
    (0.100, 0.280, 0.060),
    (0.075, 0.240, 0.090),
    (0.120, 0.300, 0.070),
    (0.150, 0.290, 0.055),
    (0.190, 0.300, 0.060),
    (0.230, 0.300, 0.055),
    (0.270, 0.310, 0.060),
)

DEFAULT_GRASS_COLOR = GRASS_PALETTE[1]

# Hue band (HSV hue, unit range) considered "green" for the G flag.
GREEN_HUE_BAND = (0.22, 0.42)

WHITE_TINT = (1.0, 1.0, 1.0)
YELLOW_TINT = (1.0, 0.88, 0.60)

# Five procedural grass texture presets (noise octave configurations).
TEXTURE_PRESET_COUNT = 5


@dataclass(frozen=True)
class StripePattern:
    """Mowing stripes: band orientation, period in meters, contrast multiplier."""

    orientation: float  # radians, direction across the bands in the ground plane
    period: float
    contrast: float  # 1.0 = no stripes

    def to_dict(self):
        return {"orientation": self.orientation, "period": self.period, "contrast": self.contrast}

    @classmethod
    def from_dict(cls, d):
        return cls(d["orientation"], d["period"], d["contrast"])


NO_STRIPES = StripePattern(0.0, 8.0, 1.0)

DEFAULT_PATTERN_LIBRARY = (
    StripePattern(0.0, 5.25, 1.20),
    StripePattern(math.pi / 2, 6.8, 1.20),
    StripePattern(0.0, 7.5, 1.14),
    StripePattern(math.pi / 2, 4.25, 1.26),
    StripePattern(0.0, 10.5, 1.17),
)


@dataclass(frozen=True)
class RandomizationConfig:
    flags: frozenset
    palette: tuple = GRASS_PALETTE
    pattern_library: tuple = DEFAULT_PATTERN_LIBRARY
    lighting_tints: tuple = (WHITE_TINT, YELLOW_TINT)
    fake_line_count_range: tuple[int, int] = (1, 4)
    player_count_range: tuple[int, int] = (14, 22)
    camera_ranges: CameraRanges = field(default_factory=CameraRanges)

    def __post_init__(self):
        unknown = set(self.flags) - set("JAGPLCMF")
        if unknown:
            raise ValueError(f"unknown randomization flags: {sorted(unknown)}")


def variant_config(variant: DatasetVariant) -> RandomizationConfig:
    """Flag set and default ranges for a ladder variant."""
    return RandomizationConfig(flags=VARIANT_FLAGS[variant])


@dataclass(frozen=True)
class Player:
    position: tuple[float, float]  # ground plane, meters
    jersey_color: tuple[float, float, float]  # linear RGB
    team: int

    def to_dict(self):
        return {"position": list(self.position), "jersey_color": list(self.jersey_color), "team": self.team}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(d["position"]), tuple(d["jersey_color"]), d["team"])


@dataclass(frozen=True)
class SceneSpec:
    """One concrete sampled scene: everything the renderer needs."""

    seed: int
    base_grass_color: tuple[float, float, float]
    grass_texture_preset: int
    stripe_pattern: StripePattern
    lighting_tint: tuple[float, float, float]
    camera: CameraParams
    fake_lines: tuple  # of (t0, t1) perimeter parameters
    players: tuple  # of Player
    audience_on: bool
    audience_texture_seed: int

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "base_grass_color": list(self.base_grass_color),
            "grass_texture_preset": self.grass_texture_preset,
            "stripe_pattern": self.stripe_pattern.to_dict(),
            "lighting_tint": list(self.lighting_tint),
            "camera": self.camera.to_dict(),
            "fake_lines": [list(p) for p in self.fake_lines],
            "players": [p.to_dict() for p in self.players],
            "audience_on": self.audience_on,
            "audience_texture_seed": self.audience_texture_seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SceneSpec":
        return cls(
            seed=d["seed"],
            base_grass_color=tuple(d["base_grass_color"]),
            grass_texture_preset=d["grass_texture_preset"],
            stripe_pattern=StripePattern.from_dict(d["stripe_pattern"]),
            lighting_tint=tuple(d["lighting_tint"]),
            camera=CameraParams.from_dict(d["camera"]),
            fake_lines=tuple(tuple(p) for p in d["fake_lines"]),
            players=tuple(Player.from_dict(p) for p in d["players"]),
            audience_on=d["audience_on"],
            audience_texture_seed=d["audience_texture_seed"],
        )


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator keyed off (seed, key); cheap and deterministic."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


# Substream keys; each scene element draws from its own stream so toggling
# one flag never perturbs the others' draws.
_K_GRASS, _K_TEXTURE, _K_STRIPES, _K_LIGHT, _K_CAMERA, _K_FAKE, _K_PLAYERS, _K_AUDIENCE = range(8)


def _sample_green_shade(rng: np.random.Generator) -> tuple[float, float, float]:
    h = rng.uniform(*GREEN_HUE_BAND)
    s = rng.uniform(0.55, 0.85)
    v = rng.uniform(0.22, 0.42)
    return colorsys.hsv_to_rgb(h, s, v)


def _sample_jersey(rng: np.random.Generator, grass: tuple) -> tuple[float, float, float]:
    # keep jerseys away from white (line color) and from the grass color
    grass = np.asarray(grass)
    for _ in range(256):
        c = rng.uniform(0.0, 1.0, 3)
        if np.linalg.norm(c - 1.0) > 0.45 and np.linalg.norm(c - grass) > 0.3:
            return tuple(c)
    return (0.7, 0.1, 0.1)


def sample_scene(
    seed: int,
    config: RandomizationConfig,
    field_model: FieldModel,
    resolution=DEFAULT_RESOLUTION,
) -> SceneSpec:
    """Draw one SceneSpec; a pure function of (seed, config, field, resolution)."""
    flags = config.flags
    dims = field_model.dims

    if "C" in flags:
        rng = substream(seed, _K_GRASS)
        grass = tuple(config.palette[rng.integers(len(config.palette))])
    elif "G" in flags:
        grass = _sample_green_shade(substream(seed, _K_GRASS))
    else:
        grass = DEFAULT_GRASS_COLOR

    if "G" in flags:
        texture = int(substream(seed, _K_TEXTURE).integers(TEXTURE_PRESET_COUNT))
    else:
        texture = 0

    if "P" in flags:
        rng = substream(seed, _K_STRIPES)
        stripes = config.pattern_library[rng.integers(len(config.pattern_library))]
    else:
        stripes = NO_STRIPES

    if "L" in flags:
        white, yellow = config.lighting_tints
        tint = tuple(yellow if substream(seed, _K_LIGHT).integers(2) else white)
    else:
        tint = tuple(config.lighting_tints[0])

    preset = MULTI_BROADCAST if "M" in flags else FIXED_BROADCAST
    camera = sample_camera(
        substream(seed, _K_CAMERA),
        preset,
        ranges=config.camera_ranges,
        resolution=resolution,
        pitch_length=dims.length,
        pitch_width=dims.width,
    )

    fake_lines = ()
    if "F" in flags:
        rng = substream(seed, _K_FAKE)
        lo, hi = config.fake_line_count_range
        n = int(rng.integers(lo, hi + 1))

        def edge_of(t: float) -> int:
            s = t * 2 * (dims.length + dims.width)
            for e, span in enumerate((dims.length, dims.width, dims.length, dims.width)):
                if s < span:
                    return e
                s -= span
            return 3

        lines = []
        while len(lines) < n:
            t0, t1 = float(rng.uniform(0, 1)), float(rng.uniform(0, 1))
            # endpoints on the same edge would coincide with a real side line
            if edge_of(t0) != edge_of(t1):
                lines.append((t0, t1))
        fake_lines = tuple(lines)

    rng = substream(seed, _K_PLAYERS)
    lo, hi = config.player_count_range
    n_players = int(rng.integers(lo, hi + 1))
    if "J" in flags:
        kit_a = _sample_jersey(rng, grass)
        kit_b = _sample_jersey(rng, grass)
    else:
        kit_a, kit_b = (0.75, 0.08, 0.08), (0.08, 0.10, 0.75)
    players = []
    for i in range(n_players):
        pos = (
            float(rng.uniform(-dims.length / 2, dims.length / 2)),
            float(rng.uniform(-dims.width / 2, dims.width / 2)),
        )
        team = i % 2
        players.append(Player(pos, kit_a if team == 0 else kit_b, team))

    rng = substream(seed, _K_AUDIENCE)
    audience_on = "A" in flags
    audience_seed = int(rng.integers(2**31))

    return SceneSpec(
        seed=seed,
        base_grass_color=tuple(float(c) for c in grass),
        grass_texture_preset=texture,
        stripe_pattern=stripes,
        lighting_tint=tuple(float(c) for c in tint),
        camera=camera,
        fake_lines=fake_lines,
        players=tuple(players),
        audience_on=audience_on,
        audience_texture_seed=audience_seed,
    )


def fake_line_endpoints(scene: SceneSpec, field_model: FieldModel):
    """World-space endpoints of the scene's fake lines (on the perimeter)."""
    return [
        (perimeter_point(field_model, t0), perimeter_point(field_model, t1))
        for t0, t1 in scene.fake_lines
    ]
