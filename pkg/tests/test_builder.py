import hashlib
import json
from pathlib import Path

import cv2
import numpy as np
import pytest

from pitchgen.builder import (
    ConfigError,
    DatasetConfig,
    MissingManifestError,
    SEED_MIX_DESCRIPTION,
    dataset_stats,
    generate_dataset,
    load_config_file,
    per_sample_seed,
    read_manifest,
    splitmix64,
    validate_dataset,
)
from pitchgen.cli import EXIT_IO, EXIT_OK, EXIT_USAGE, EXIT_VIOLATIONS, main
from pitchgen.randomization import DatasetVariant

RES = (320, 180)


def small_config(root, variant=DatasetVariant.SOCCERSYNTH_FIELD, **kw):
    kw.setdefault("sample_count", 3)
    kw.setdefault("master_seed", 11)
    kw.setdefault("resolution", RES)
    return DatasetConfig(variant=variant, output_root=str(root), **kw)


def tree_digest(root):
    """Hash of every file under root, path-keyed."""
    out = {}
    for p in sorted(Path(root).rglob("*")):
        if p.is_file():
            out[str(p.relative_to(root))] = hashlib.sha256(p.read_bytes()).hexdigest()
    return out


@pytest.fixture(scope="module")
def built(tmp_path_factory):
    root = tmp_path_factory.mktemp("ds")
    config = small_config(root, emit_diagnostic_mask=True)
    records = generate_dataset(config, workers=1)
    return root, config, records


class TestSeedMix:
    def test_splitmix_known_value(self):
        # first output of the splitmix64 reference sequence from state 0
        assert splitmix64(0) == 0xE220A8397B1DCDAF

    def test_per_sample_seeds_distinct(self):
        seeds = {per_sample_seed(0, i) for i in range(1000)}
        assert len(seeds) == 1000

    def test_master_seed_changes_everything(self):
        a = [per_sample_seed(1, i) for i in range(100)]
        b = [per_sample_seed(2, i) for i in range(100)]
        assert not set(a) & set(b)


class TestGenerate:
    def test_layout_and_manifest(self, built):
        root, config, records = built
        assert len(records) == 3
        header, recs = read_manifest(root)
        assert header["seed_mix"] == SEED_MIX_DESCRIPTION
        assert header["config"]["sample_count"] == 3
        for rec in recs:
            for key in ("image", "mask", "annotation", "scene", "diagnostic_mask"):
                assert (root / rec[key]).exists(), f"{key} missing for {rec['index']}"
            assert rec["seed"] == per_sample_seed(config.master_seed, rec["index"])

    def test_mask_labels_in_range(self, built):
        root, _, records = built
        for rec in records:
            mask = cv2.imread(str(root / rec["mask"]), cv2.IMREAD_GRAYSCALE)
            assert mask.max() <= 26
            diag = cv2.imread(str(root / rec["diagnostic_mask"]), cv2.IMREAD_GRAYSCALE)
            assert diag.max() <= 27

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        generate_dataset(small_config(a, sample_count=2), workers=1)
        generate_dataset(small_config(b, sample_count=2), workers=2)
        da, db = tree_digest(a), tree_digest(b)
        # manifest headers differ by timestamp only; compare sample files
        da.pop("manifest.jsonl"), db.pop("manifest.jsonl")
        assert da == db

    def test_validates_clean(self, built):
        root, _, _ = built
        report = validate_dataset(root, fraction=1.0)
        assert report.ok, report.violations

    def test_no_manifest_on_fresh_dir(self, tmp_path):
        with pytest.raises(MissingManifestError):
            read_manifest(tmp_path)

    def test_default_sample_count(self):
        assert DatasetConfig(variant=DatasetVariant.JA, output_root="x").sample_count == 20000

    def test_bad_config_values(self):
        with pytest.raises(ConfigError):
            small_config("x", sample_count=0)
        with pytest.raises(ConfigError):
            small_config("x", camera_preset="orbit")


class TestValidateFaults:
    @pytest.fixture()
    def faulty(self, tmp_path):
        root = tmp_path / "ds"
        generate_dataset(small_config(root, sample_count=2), workers=1)
        return root

    def test_missing_annotation_detected(self, faulty):
        _, records = read_manifest(faulty)
        (faulty / records[0]["annotation"]).unlink()
        report = validate_dataset(faulty)
        assert any(v["kind"] == "missing-file" for v in report.violations)

    def test_out_of_range_label_detected(self, faulty):
        _, records = read_manifest(faulty)
        path = faulty / records[1]["mask"]
        mask = cv2.imread(str(path), cv2.IMREAD_GRAYSCALE)
        mask[0, 0] = 99
        cv2.imwrite(str(path), mask)
        report = validate_dataset(faulty)
        assert any(v["kind"] == "label-range" for v in report.violations)

    def test_class_set_drift_detected(self, faulty):
        _, records = read_manifest(faulty)
        path = faulty / records[0]["annotation"]
        doc = json.loads(path.read_bytes())
        doc.pop(next(iter(doc)))
        path.write_text(json.dumps(doc))
        report = validate_dataset(faulty)
        assert any(v["kind"] == "class-set-mismatch" for v in report.violations)

    def test_dimension_mismatch_detected(self, faulty):
        _, records = read_manifest(faulty)
        path = faulty / records[0]["image"]
        img = cv2.imread(str(path))
        cv2.imwrite(str(path), img[:-4, :-4])
        report = validate_dataset(faulty)
        assert any(v["kind"] == "dimension-mismatch" for v in report.violations)


class TestStats:
    def test_fixed_camera_stats(self, tmp_path):
        root = tmp_path / "ds"
        generate_dataset(small_config(root, variant=DatasetVariant.JA, sample_count=3), workers=1)
        stats = dataset_stats(root)
        assert stats["sample_count"] == 3
        assert stats["camera_unique_poses"] == 1
        assert stats["fake_line_count_histogram"] == {0: 3}
        # the baseline variant uses one grass color
        assert len(stats["grass_color_histogram"]) == 1
        assert stats["class_frequency"]["Middle line"] == 1.0


class TestConfigFile:
    def write(self, tmp_path, text):
        p = tmp_path / "conf.yaml"
        p.write_text(text)
        return p

    def test_full_round_trip(self, tmp_path):
        p = self.write(tmp_path, (
            "variant: JA_G_P\n"
            "output_root: out\n"
            "sample_count: 7\n"
            "master_seed: 3\n"
            "resolution: 640x360\n"
            "camera_preset: multi\n"
            "field_length: 100.0\n"
        ))
        config = load_config_file(p)
        assert config.variant is DatasetVariant.JA_G_P
        assert config.sample_count == 7
        assert config.resolution == (640, 360)
        assert config.field_dims.length == 100.0
        assert "M" in config.randomization().flags

    def test_unknown_key_rejected(self, tmp_path):
        p = self.write(tmp_path, "variant: JA\noutput_root: out\nspeed: fast\n")
        with pytest.raises(ConfigError, match="speed"):
            load_config_file(p)

    def test_unknown_variant_rejected(self, tmp_path):
        p = self.write(tmp_path, "variant: DELUXE\noutput_root: out\n")
        with pytest.raises(ConfigError, match="DELUXE"):
            load_config_file(p)

    def test_overrides_win(self, tmp_path):
        p = self.write(tmp_path, "variant: JA\noutput_root: out\nsample_count: 5\n")
        config = load_config_file(p, {"sample_count": 2, "output_root": "elsewhere"})
        assert config.sample_count == 2
        assert config.output_root == "elsewhere"


class TestCli:
    def config_file(self, tmp_path, count=2):
        p = tmp_path / "conf.yaml"
        p.write_text(
            f"variant: JA_G\noutput_root: {tmp_path / 'ds'}\n"
            f"sample_count: {count}\nmaster_seed: 5\nresolution: 320x180\n"
        )
        return p

    def test_generate_validate_stats(self, tmp_path, capsys):
        p = self.config_file(tmp_path)
        assert main(["generate", "--config", str(p), "--workers", "1"]) == EXIT_OK
        assert main(["validate", "--root", str(tmp_path / "ds"), "--fraction", "1.0"]) == EXIT_OK
        assert main(["stats", "--root", str(tmp_path / "ds")]) == EXIT_OK
        out = capsys.readouterr().out
        assert "generated 2 samples" in out
        assert "0 violations" in out

    def test_validate_reports_violations(self, tmp_path):
        p = self.config_file(tmp_path)
        assert main(["generate", "--config", str(p), "--workers", "1"]) == EXIT_OK
        _, records = read_manifest(tmp_path / "ds")
        (tmp_path / "ds" / records[0]["mask"]).unlink()
        assert main(["validate", "--root", str(tmp_path / "ds")]) == EXIT_VIOLATIONS

    def test_validate_missing_manifest(self, tmp_path):
        assert main(["validate", "--root", str(tmp_path)]) == EXIT_IO

    def test_bad_config_is_usage_error(self, tmp_path):
        p = tmp_path / "conf.yaml"
        p.write_text("variant: JA\noutput_root: out\nbogus_key: 1\n")
        assert main(["generate", "--config", str(p)]) == EXIT_USAGE

    def test_unknown_subcommand(self, capsys):
        assert main(["frobnicate"]) == EXIT_USAGE

    def test_preview_writes_image(self, tmp_path):
        p = self.config_file(tmp_path)
        out = tmp_path / "preview.png"
        assert main(["preview", "--config", str(p), "--index", "0", "--out", str(out)]) == EXIT_OK
        img = cv2.imread(str(out))
        assert img is not None and img.shape == (180, 320, 3)

    def test_score_round_trip(self, tmp_path, capsys):
        p = self.config_file(tmp_path)
        assert main(["generate", "--config", str(p), "--workers", "1"]) == EXIT_OK
        masks = tmp_path / "ds" / "masks"
        report = tmp_path / "report.txt"
        assert main(["score", "--pred", str(masks), "--gt", str(masks),
                     "--report", str(report)]) == EXIT_OK
        text = report.read_text()
        metrics = json.loads(text.rsplit("METRICS ", 1)[1])
        assert metrics["acc"] == 1.0
        assert metrics["miou"] == 1.0
