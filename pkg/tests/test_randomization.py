import colorsys

import numpy as np
import pytest

from pitchgen.geometry import on_perimeter
from pitchgen.randomization import (
    GRASS_PALETTE,
    GREEN_HUE_BAND,
    DatasetVariant,
    RandomizationConfig,
    VARIANT_ORDER,
    fake_line_endpoints,
    sample_scene,
    variant_config,
)

SMALL_RES = (320, 180)


def scene(seed, flags, field_model, **kwargs):
    cfg = RandomizationConfig(flags=frozenset(flags), **kwargs)
    return sample_scene(seed, cfg, field_model, resolution=SMALL_RES)


class TestVariantConfig:
    def test_ja_flags(self):
        assert variant_config(DatasetVariant.JA).flags == frozenset("JA")

    def test_full_variant_has_fake_lines(self):
        assert "F" in variant_config(DatasetVariant.SOCCERSYNTH_FIELD).flags

    def test_ladder_is_strict_superset_chain(self):
        for prev, nxt in zip(VARIANT_ORDER, VARIANT_ORDER[1:]):
            a, b = variant_config(prev).flags, variant_config(nxt).flags
            assert a < b

    def test_f_only_in_final_variant(self):
        for v in VARIANT_ORDER[:-1]:
            assert "F" not in variant_config(v).flags

    def test_c_and_m_arrive_together(self):
        for v in VARIANT_ORDER:
            flags = variant_config(v).flags
            assert ("C" in flags) == ("M" in flags)

    def test_unknown_flags_rejected(self):
        with pytest.raises(ValueError):
            RandomizationConfig(flags=frozenset("JAX"))


class TestSampleScene:
    def test_deterministic(self, field_model):
        a = scene(99, "JAGPLCMF", field_model)
        b = scene(99, "JAGPLCMF", field_model)
        assert a == b

    def test_no_fake_lines_without_f(self, field_model):
        assert scene(5, "JAGPL", field_model).fake_lines == ()

    def test_defaults_without_flags(self, field_model):
        s = scene(5, "J", field_model)
        assert s.stripe_pattern.contrast == 1.0
        assert s.lighting_tint == (1.0, 1.0, 1.0)
        assert s.audience_on is False

    def test_fake_line_endpoints_on_perimeter(self, field_model):
        for seed in range(1000):
            s = scene(seed, "JAGPLCMF", field_model)
            assert s.fake_lines
            for p0, p1 in fake_line_endpoints(s, field_model):
                assert on_perimeter(field_model, p0)
                assert on_perimeter(field_model, p1)

    def test_lighting_binary_choice(self, field_model):
        tints = {scene(seed, "JAL", field_model).lighting_tint for seed in range(500)}
        cfg = RandomizationConfig(flags=frozenset("JAL"))
        assert tints == {tuple(cfg.lighting_tints[0]), tuple(cfg.lighting_tints[1])}

    def test_green_shades_stay_in_hue_band(self, field_model):
        for seed in range(500):
            s = scene(seed, "JAG", field_model)
            h, _, _ = colorsys.rgb_to_hsv(*s.base_grass_color)
            assert GREEN_HUE_BAND[0] <= h <= GREEN_HUE_BAND[1]

    def test_full_palette_coverage_with_c(self, field_model):
        seen = {scene(seed, "JAGCM", field_model).base_grass_color for seed in range(2000)}
        hits = sum(1 for c in GRASS_PALETTE if tuple(c) in seen)
        assert hits >= 9

    def test_fixed_camera_without_m(self, field_model):
        cams = {scene(seed, "JA", field_model).camera for seed in range(10)}
        assert len(cams) == 1

    def test_multi_camera_with_m(self, field_model):
        cams = {scene(seed, "JACM", field_model).camera for seed in range(10)}
        assert len(cams) == 10


FLAG_FIELDS = {
    "G": ("base_grass_color", "grass_texture_preset"),
    "P": ("stripe_pattern",),
    "L": ("lighting_tint",),
    "M": ("camera",),
    "F": ("fake_lines",),
    "J": ("players",),
    "A": ("audience_on",),
}

ALL_FIELDS = (
    "base_grass_color",
    "grass_texture_preset",
    "stripe_pattern",
    "lighting_tint",
    "camera",
    "fake_lines",
    "players",
    "audience_on",
    "audience_texture_seed",
)


class TestConditionalIndependence:
    @pytest.mark.parametrize("flag", list("GPLMFJA"))
    def test_toggling_one_flag_changes_only_its_fields(self, field_model, flag):
        base_flags = set("JAGPLCMF") - {flag}
        if flag == "M":
            base_flags -= {"C"}  # C draws from the full palette only with M
        for seed in (3, 17, 101):
            without = scene(seed, "".join(base_flags), field_model)
            with_flag = scene(seed, "".join(base_flags | {flag}), field_model)
            allowed = set(FLAG_FIELDS[flag])
            for name in ALL_FIELDS:
                if name in allowed:
                    continue
                assert getattr(without, name) == getattr(with_flag, name), (
                    f"flag {flag} leaked into field {name}"
                )
