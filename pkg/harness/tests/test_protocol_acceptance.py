"""Release checks for the training harness.

The generator is exercised ONLY through its CLI in a separate process; the
harness sees nothing but the directories it leaves on disk.
"""

import json
from pathlib import Path

import pytest

from conftest import generate_via_cli
from train_harness import ExperimentConfig, run_protocol
from train_harness.cli import main


@pytest.fixture(scope="module")
def protocol_datasets(tmp_path_factory):
    base = tmp_path_factory.mktemp("accept")
    # held-out draws of the same distribution stand in for real footage
    synthetic = generate_via_cli(base / "synthetic", "SOCCERSYNTH_FIELD", count=200, seed=21)
    real = generate_via_cli(base / "real", "SOCCERSYNTH_FIELD", count=200, seed=22)
    test = generate_via_cli(base / "test", "SOCCERSYNTH_FIELD", count=60, seed=23)
    return synthetic, real, test


def test_directional_pretraining_benefit(tmp_path, protocol_datasets):
    """Synthetic pretraining helps: finetuned Acc >= baseline Acc in >= 2 of 3 seeds."""
    synthetic, real, test = protocol_datasets
    wins = 0
    pairs = []
    for seed in (0, 1, 2):
        config = ExperimentConfig(
            synthetic_root=str(synthetic),
            real_train_root=str(real),
            test_root=str(test),
            out_dir=str(tmp_path / f"seed{seed}"),
            model="toy",
            epochs=2,
            pretrain_epochs=4,
            batch_size=8,
            lr=0.05,
        )
        baseline = run_protocol(config, "baseline", seed=seed)
        finetuned = run_protocol(config, "pretrain_finetune", seed=seed)
        pairs.append((seed, baseline.final_acc, finetuned.final_acc))
        if finetuned.final_acc >= baseline.final_acc:
            wins += 1
    detail = "; ".join(f"seed {s}: baseline {b:.4f} vs pretrained {f:.4f}" for s, b, f in pairs)
    assert wins >= 2, f"pretraining helped in only {wins}/3 seeds ({detail})"
    print(f"PASS directional pretraining: {wins}/3 seeds improved or tied ({detail})")


def test_format_interoperability(tmp_path, protocol_datasets):
    """End-to-end training on CLI-generated data, with zero in-process coupling."""
    # the harness never imports the generator package
    src = Path(__file__).resolve().parents[1] / "src" / "train_harness"
    for f in src.rglob("*.py"):
        assert "pitchgen" not in f.read_text(), f"{f.name} references the generator package"

    synthetic, real, test = protocol_datasets
    conf = tmp_path / "conf.yaml"
    conf.write_text(
        f"synthetic_root: {synthetic}\nreal_train_root: {real}\ntest_root: {test}\n"
        f"out_dir: {tmp_path / 'runs'}\nmodel: toy\nepochs: 1\nbatch_size: 8\n"
        "real_train_subset: 40\n"
    )
    assert main(["train", "--config", str(conf), "--protocol", "baseline", "--seed", "9"]) == 0
    ckpt = tmp_path / "runs" / "baseline_seed9.pt"
    assert ckpt.exists()
    record = json.loads((tmp_path / "runs" / "baseline_seed9.metrics.jsonl")
                        .read_text().splitlines()[-1])
    assert 0.0 <= record["final_acc"] <= 1.0
    assert main(["evaluate", "--checkpoint", str(ckpt), "--test", str(test),
                 "--config", str(conf)]) == 0
    print(f"PASS interop: trained and evaluated end-to-end on CLI-generated data "
          f"(Acc {record['final_acc']:.4f})")
