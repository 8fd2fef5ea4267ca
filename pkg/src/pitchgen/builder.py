"""End-to-end dataset generation, validation, and statistics.

Layout under output_root:
    images/000000.png        gamma-encoded RGB frame
    masks/000000.png         single-channel training mask (ids 0..26)
    masks_diagnostic/...png  optional, ids 0..27 (27 = fake line)
    annotations/000000.json  line annotations
    scenes/000000.json       full SceneSpec (reproducibility record)
    manifest.jsonl           header line + one record per sample, written last

Per-sample seed = splitmix64(splitmix64(master_seed) + index + 1);
the mix is echoed in the manifest header so datasets stay reproducible.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import cv2
import numpy as np

from . import __version__
from .annotation import emit_annotation, generate_keypoints, parse_annotation, AnnotationError
from .geometry import CLASS_TO_ID, LINE_CLASSES, FieldDimensions, build_field_model
from .randomization import (
    DatasetVariant,
    RandomizationConfig,
    SceneSpec,
    sample_scene,
    variant_config,
)
from .renderer import line_strokes, render_image, render_mask

SEED_MIX_DESCRIPTION = "splitmix64(splitmix64(master_seed) + index + 1) over uint64"
PNG_PARAMS = [cv2.IMWRITE_PNG_COMPRESSION, 3]


class MissingManifestError(FileNotFoundError):
    pass


class ConfigError(ValueError):
    pass


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return x ^ (x >> 31)


def per_sample_seed(master_seed: int, index: int) -> int:
    return splitmix64((splitmix64(master_seed) + index + 1) & 0xFFFFFFFFFFFFFFFF)


@dataclass(frozen=True)
class DatasetConfig:
    variant: DatasetVariant
    output_root: str
    sample_count: int = 20000
    master_seed: int = 0
    resolution: tuple[int, int] = (1920, 1080)
    field_dims: FieldDimensions = field(default_factory=FieldDimensions)
    camera_preset: str | None = None  # None = from variant; "fixed" | "multi"
    fake_line_count_range: tuple[int, int] = (1, 4)
    player_count_range: tuple[int, int] = (14, 22)
    emit_diagnostic_mask: bool = False

    def __post_init__(self):
        if self.sample_count < 1:
            raise ConfigError("sample_count must be >= 1")
        if self.resolution[0] <= 0 or self.resolution[1] <= 0:
            raise ConfigError("resolution must be positive")
        if self.camera_preset not in (None, "fixed", "multi"):
            raise ConfigError("camera_preset must be 'fixed' or 'multi'")

    def randomization(self) -> RandomizationConfig:
        base = variant_config(self.variant)
        flags = set(base.flags)
        if self.camera_preset == "fixed":
            flags.discard("M")
        elif self.camera_preset == "multi":
            flags.add("M")
        return dataclasses.replace(
            base,
            flags=frozenset(flags),
            fake_line_count_range=self.fake_line_count_range,
            player_count_range=self.player_count_range,
        )

    def to_dict(self) -> dict:
        # output_root deliberately omitted: all manifest paths are relative,
        # and identical runs into different directories must byte-match
        return {
            "variant": self.variant.value,
            "sample_count": self.sample_count,
            "master_seed": self.master_seed,
            "resolution": list(self.resolution),
            "field_dims": dataclasses.asdict(self.field_dims),
            "camera_preset": self.camera_preset,
            "fake_line_count_range": list(self.fake_line_count_range),
            "player_count_range": list(self.player_count_range),
            "emit_diagnostic_mask": self.emit_diagnostic_mask,
        }


_CONFIG_FILE_KEYS = {
    "variant",
    "sample_count",
    "master_seed",
    "output_root",
    "resolution",
    "camera_preset",
    "emit_diagnostic_mask",
    "fake_line_count_min",
    "fake_line_count_max",
    "player_count_min",
    "player_count_max",
    "field_length",
    "field_width",
    "field_circle_radius",
    "field_penalty_area_depth",
    "field_penalty_area_width",
    "field_goal_area_depth",
    "field_goal_area_width",
    "field_penalty_spot_distance",
    "field_goal_width",
    "field_goal_height",
    "field_line_width",
}


def load_config_file(path, overrides: dict | None = None) -> DatasetConfig:
    """Load a flat key-value (YAML mapping) config file into a DatasetConfig."""
    import yaml

    with open(path) as f:
        raw = yaml.safe_load(f) or {}
    if not isinstance(raw, dict):
        raise ConfigError("config file must be a flat key: value mapping")
    unknown = set(raw) - _CONFIG_FILE_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if overrides:
        raw.update(overrides)
    if "variant" not in raw:
        raise ConfigError("config must set 'variant'")
    if "output_root" not in raw:
        raise ConfigError("config must set 'output_root'")
    try:
        variant = DatasetVariant(str(raw["variant"]))
    except ValueError:
        raise ConfigError(f"unknown variant: {raw['variant']!r}") from None
    resolution = (1920, 1080)
    if "resolution" in raw:
        value = raw["resolution"]
        if isinstance(value, str):
            w, _, h = value.partition("x")
            resolution = (int(w), int(h))
        else:
            resolution = (int(value[0]), int(value[1]))
    dim_kwargs = {
        k.removeprefix("field_"): float(raw[k]) for k in raw if k.startswith("field_")
    }
    return DatasetConfig(
        variant=variant,
        output_root=str(raw["output_root"]),
        sample_count=int(raw.get("sample_count", 20000)),
        master_seed=int(raw.get("master_seed", 0)),
        resolution=resolution,
        field_dims=FieldDimensions(**dim_kwargs),
        camera_preset=raw.get("camera_preset"),
        fake_line_count_range=(
            int(raw.get("fake_line_count_min", 1)),
            int(raw.get("fake_line_count_max", 4)),
        ),
        player_count_range=(
            int(raw.get("player_count_min", 14)),
            int(raw.get("player_count_max", 22)),
        ),
        emit_diagnostic_mask=bool(raw.get("emit_diagnostic_mask", False)),
    )


def _camera_digest(scene: SceneSpec) -> str:
    blob = json.dumps(scene.camera.to_dict(), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


def _reconcile(doc: dict, mask: np.ndarray):
    """Make the annotation class set and the mask class set agree.

    Classes with annotation points but no mask pixels (sub-pixel slivers) are
    dropped from the document; mask pixels of classes missing from the
    document are cleared. Both cases are frame-edge rarities.
    """
    mask_ids = set(int(v) for v in np.unique(mask)) - {0}
    doc_ids = {CLASS_TO_ID[name] for name in doc}
    for name in [n for n in doc if CLASS_TO_ID[n] not in mask_ids]:
        del doc[name]
    for cid in mask_ids - doc_ids:
        mask[mask == cid] = 0
    return doc, mask


def build_sample(config: DatasetConfig, index: int):
    """Generate one sample's arrays: (scene, image, mask, diag_or_None, doc)."""
    field_model = build_field_model(config.field_dims)
    seed = per_sample_seed(config.master_seed, index)
    scene = sample_scene(seed, config.randomization(), field_model, resolution=config.resolution)
    image = render_image(scene, field_model, scene.camera)
    if config.emit_diagnostic_mask:
        mask, diag = render_mask(scene, field_model, scene.camera, diagnostic=True)
    else:
        mask = render_mask(scene, field_model, scene.camera)
        diag = None
    doc = generate_keypoints(field_model, scene.camera)
    doc, mask = _reconcile(doc, mask)
    return scene, image, mask, diag, doc


def _write_png(path: Path, array: np.ndarray) -> None:
    if array.ndim == 3:
        array = cv2.cvtColor(array, cv2.COLOR_RGB2BGR)
    ok, buf = cv2.imencode(".png", array, PNG_PARAMS)
    if not ok:
        raise IOError(f"PNG encoding failed for {path}")
    path.write_bytes(buf.tobytes())


def _generate_one(config: DatasetConfig, index: int) -> dict:
    """Worker: build and write one sample, return its manifest record."""
    root = Path(config.output_root)
    stem = f"{index:06d}"
    scene, image, mask, diag, doc = build_sample(config, index)
    paths = {
        "image": f"images/{stem}.png",
        "mask": f"masks/{stem}.png",
        "annotation": f"annotations/{stem}.json",
        "scene": f"scenes/{stem}.json",
    }
    _write_png(root / paths["image"], image)
    _write_png(root / paths["mask"], mask)
    if diag is not None:
        paths["diagnostic_mask"] = f"masks_diagnostic/{stem}.png"
        _write_png(root / paths["diagnostic_mask"], diag)
    (root / paths["annotation"]).write_bytes(emit_annotation(doc))
    (root / paths["scene"]).write_text(json.dumps(scene.to_dict(), sort_keys=True, indent=1))
    return {
        "kind": "sample",
        "index": index,
        "seed": scene.seed,
        "camera_digest": _camera_digest(scene),
        **paths,
    }


def generate_dataset(config: DatasetConfig, workers: int | None = None) -> list[dict]:
    """Generate the full dataset; returns the manifest records.

    The manifest is written last via a temp file + atomic rename, so an
    interrupted run is detectable by a missing manifest.
    """
    root = Path(config.output_root)
    for sub in ("images", "masks", "annotations", "scenes"):
        (root / sub).mkdir(parents=True, exist_ok=True)
    if config.emit_diagnostic_mask:
        (root / "masks_diagnostic").mkdir(parents=True, exist_ok=True)
    if workers is None:
        workers = os.cpu_count() or 1
    indices = range(config.sample_count)
    if workers > 1 and config.sample_count > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_generate_one, [config] * config.sample_count, indices,
                                    chunksize=max(1, config.sample_count // (workers * 8))))
    else:
        records = [_generate_one(config, i) for i in indices]
    records.sort(key=lambda r: r["index"])
    header = {
        "kind": "header",
        "tool_version": __version__,
        "created_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "seed_mix": SEED_MIX_DESCRIPTION,
        "config": config.to_dict(),
    }
    tmp = root / "manifest.jsonl.tmp"
    with open(tmp, "w") as f:
        f.write(json.dumps(header, sort_keys=True) + "\n")
        for rec in records:
            f.write(json.dumps(rec, sort_keys=True) + "\n")
    os.replace(tmp, root / "manifest.jsonl")
    return records


def read_manifest(root) -> tuple[dict, list[dict]]:
    path = Path(root) / "manifest.jsonl"
    if not path.exists():
        raise MissingManifestError(f"no manifest.jsonl under {root}")
    with open(path) as f:
        lines = [json.loads(line) for line in f if line.strip()]
    if not lines or lines[0].get("kind") != "header":
        raise MissingManifestError("manifest has no header line")
    return lines[0], [r for r in lines[1:] if r.get("kind") == "sample"]


@dataclass
class ValidationReport:
    samples_checked: int
    violations: list = field(default_factory=list)

    def add(self, index: int, kind: str, detail: str) -> None:
        self.violations.append({"index": index, "kind": kind, "detail": detail})

    @property
    def ok(self) -> bool:
        return not self.violations


def _segment_distances(points_uv: np.ndarray, seg) -> np.ndarray:
    (u0, v0), (u1, v1), _ = seg
    a = np.array([u0, v0])
    d = np.array([u1 - u0, v1 - v0])
    denom = float(d @ d)
    rel = points_uv - a
    t = np.clip((rel @ d) / denom, 0.0, 1.0) if denom > 0 else np.zeros(len(rel))
    return np.linalg.norm(rel - t[:, None] * d, axis=1)


def reprojection_stats(image: np.ndarray, mask: np.ndarray, doc: dict, strokes: dict | None = None,
                       tolerance_px: float = 1.0, white_threshold: int = 140):
    """(points_total, points_near_stroke, points_in_frame) for one sample.

    A point passes when a white-ish image pixel covered by a stroke of the
    point's class lies within tolerance_px. Class membership of a pixel comes
    from `strokes` ({class_id: [(uv0, uv1, width_px)]}) when given, else from
    the mask — the mask understates it where classes overlap, since overlap
    pixels keep only one id.
    """
    h, w = mask.shape
    total = ok = in_frame = 0
    reach = int(math.ceil(tolerance_px)) + 1
    for name, pts in doc.items():
        cid = CLASS_TO_ID[name]
        for x, y in pts:
            total += 1
            u, v = x * w, y * h
            if 0.0 <= u <= w and 0.0 <= v <= h:
                in_frame += 1
            j0, j1 = max(0, int(u) - reach), min(w, int(u) + reach + 1)
            i0, i1 = max(0, int(v) - reach), min(h, int(v) + reach + 1)
            if j0 >= j1 or i0 >= i1:
                continue
            ii, jj = np.mgrid[i0:i1, j0:j1]
            ii, jj = ii.ravel(), jj.ravel()
            cu, cv = jj + 0.5, ii + 0.5
            near = (cu - u) ** 2 + (cv - v) ** 2 <= tolerance_px**2
            if not near.any():
                continue
            ii, jj, cu, cv = ii[near], jj[near], cu[near], cv[near]
            if strokes is not None:
                centers = np.stack([cu, cv], axis=1)
                covered = np.zeros(len(ii), dtype=bool)
                for seg in strokes.get(cid, ()):
                    covered |= _segment_distances(centers, seg) <= seg[2] / 2.0
            else:
                covered = mask[ii, jj] == cid
            if not covered.any():
                continue
            pix = image[ii[covered], jj[covered]]
            if (pix.min(axis=1) >= white_threshold).any():
                ok += 1
    return total, ok, in_frame


def validate_dataset(root, fraction: float = 0.05,
                     reproj_min_fraction: float = 0.99) -> ValidationReport:
    """Re-check every invariant checkable from disk."""
    root = Path(root)
    header, records = read_manifest(root)
    res = header["config"]["resolution"]
    field_model = build_field_model(FieldDimensions(**header["config"]["field_dims"]))
    report = ValidationReport(samples_checked=len(records))
    rng = np.random.Generator(np.random.PCG64(0))
    n_reproj = max(1, int(round(fraction * len(records))))
    reproj_set = set(rng.choice(len(records), size=min(n_reproj, len(records)), replace=False).tolist())
    for pos, rec in enumerate(records):
        i = rec["index"]
        missing = [k for k in ("image", "mask", "annotation", "scene") if not (root / rec[k]).exists()]
        if missing:
            report.add(i, "missing-file", f"missing {missing}")
            continue
        try:
            doc = parse_annotation((root / rec["annotation"]).read_bytes())
        except AnnotationError as e:
            report.add(i, "annotation-error", str(e))
            continue
        mask = cv2.imread(str(root / rec["mask"]), cv2.IMREAD_GRAYSCALE)
        image = cv2.imread(str(root / rec["image"]), cv2.IMREAD_COLOR)
        if mask is None or image is None:
            report.add(i, "unreadable-file", "image or mask failed to decode")
            continue
        image = cv2.cvtColor(image, cv2.COLOR_BGR2RGB)
        if list(image.shape[:2]) != [res[1], res[0]] or list(mask.shape) != [res[1], res[0]]:
            report.add(i, "dimension-mismatch", f"image {image.shape} mask {mask.shape} vs {res}")
            continue
        if mask.max(initial=0) > 26:
            report.add(i, "label-range", f"mask contains label {int(mask.max())}")
            continue
        mask_ids = set(int(v) for v in np.unique(mask)) - {0}
        doc_ids = {CLASS_TO_ID[n] for n in doc}
        if mask_ids != doc_ids:
            report.add(i, "class-set-mismatch", f"mask {sorted(mask_ids)} vs annotation {sorted(doc_ids)}")
            continue
        if pos in reproj_set:
            scene = SceneSpec.from_dict(json.loads((root / rec["scene"]).read_text()))
            strokes = line_strokes(scene, field_model, scene.camera)
            total, ok, in_frame = reprojection_stats(image, mask, doc, strokes)
            if total and in_frame < total:
                report.add(i, "point-out-of-frame", f"{total - in_frame} of {total} points outside")
            if total and ok / total < reproj_min_fraction:
                report.add(i, "reprojection", f"only {ok}/{total} points near a same-class stroke")
    return report


def dataset_stats(root) -> dict:
    """Summary statistics over a generated dataset."""
    root = Path(root)
    header, records = read_manifest(root)
    class_counts = {name: 0 for name in LINE_CLASSES}
    point_sums = {name: 0 for name in LINE_CLASSES}
    grass_hist: dict[str, int] = {}
    fake_hist: dict[int, int] = {}
    positions = []
    focals = []
    for rec in records:
        doc = parse_annotation((root / rec["annotation"]).read_bytes())
        for name, pts in doc.items():
            class_counts[name] += 1
            point_sums[name] += len(pts)
        scene = json.loads((root / rec["scene"]).read_text())
        key = ",".join(f"{c:.2f}" for c in scene["base_grass_color"])
        grass_hist[key] = grass_hist.get(key, 0) + 1
        fake_n = len(scene["fake_lines"])
        fake_hist[fake_n] = fake_hist.get(fake_n, 0) + 1
        positions.append(tuple(scene["camera"]["position"]))
        focals.append(scene["camera"]["focal_px"])
    n = max(1, len(records))
    return {
        "sample_count": len(records),
        "class_frequency": {k: v / n for k, v in class_counts.items()},
        "mean_points_per_class": {
            k: (point_sums[k] / class_counts[k]) if class_counts[k] else 0.0 for k in LINE_CLASSES
        },
        "grass_color_histogram": grass_hist,
        "fake_line_count_histogram": fake_hist,
        "camera_unique_poses": len(set(positions)),
        "camera_position_min": [min(p[i] for p in positions) for i in range(3)] if positions else None,
        "camera_position_max": [max(p[i] for p in positions) for i in range(3)] if positions else None,
        "camera_focal_range": [min(focals), max(focals)] if focals else None,
    }
