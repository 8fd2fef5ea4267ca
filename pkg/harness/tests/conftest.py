import subprocess
import sys

import pytest


def generate_via_cli(root, variant, count, seed, resolution="256x144", camera_preset=None):
    """Produce a dataset using only the generator's CLI (separate process)."""
    conf = root.parent / f"{root.name}.yaml"
    lines = [
        f"variant: {variant}",
        f"output_root: {root}",
        f"sample_count: {count}",
        f"master_seed: {seed}",
        f"resolution: {resolution}",
    ]
    if camera_preset:
        lines.append(f"camera_preset: {camera_preset}")
    conf.write_text("\n".join(lines) + "\n")
    subprocess.run(
        [sys.executable, "-m", "pitchgen.cli", "generate", "--config", str(conf), "--workers", "1"],
        check=True, capture_output=True, text=True,
    )
    return root


@pytest.fixture(scope="session")
def tiny_dataset(tmp_path_factory):
    root = tmp_path_factory.mktemp("data") / "tiny"
    return generate_via_cli(root, "JA_G", count=4, seed=13)
