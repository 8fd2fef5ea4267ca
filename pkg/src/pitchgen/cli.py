"""Command-line interface.

Exit codes: 0 success, 1 validation violations, 2 usage/config error, 3 io error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import cv2
import numpy as np

from .builder import (
    ConfigError,
    DatasetConfig,
    MissingManifestError,
    _write_png,
    build_sample,
    dataset_stats,
    generate_dataset,
    load_config_file,
    validate_dataset,
)
from .geometry import LINE_CLASSES
from .metrics import ConfusionTally, accumulate, mean_iou, per_class_iou, pixel_accuracy

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_USAGE = 2
EXIT_IO = 3


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pitchgen", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a dataset")
    g.add_argument("--config", required=True, help="flat key-value config file")
    g.add_argument("--variant", help="override the dataset variant")
    g.add_argument("--count", type=int, help="override sample_count")
    g.add_argument("--seed", type=int, help="override master_seed")
    g.add_argument("--out", help="override output_root")
    g.add_argument("--workers", type=int, default=None)

    v = sub.add_parser("validate", help="validate a generated dataset")
    v.add_argument("--root", required=True)
    v.add_argument("--fraction", type=float, default=0.05,
                   help="fraction of samples for the reprojection check")

    s = sub.add_parser("stats", help="dataset statistics")
    s.add_argument("--root", required=True)

    pv = sub.add_parser("preview", help="render one sample to disk")
    pv.add_argument("--config", required=True)
    pv.add_argument("--index", type=int, required=True)
    pv.add_argument("--out", required=True, help="output image path")

    sc = sub.add_parser("score", help="score predicted masks against ground truth")
    sc.add_argument("--pred", required=True)
    sc.add_argument("--gt", required=True)
    sc.add_argument("--report", required=True)
    return p


def _load_config(args) -> DatasetConfig:
    overrides = {}
    if args.variant is not None:
        overrides["variant"] = args.variant
    if getattr(args, "count", None) is not None:
        overrides["sample_count"] = args.count
    if getattr(args, "seed", None) is not None:
        overrides["master_seed"] = args.seed
    if getattr(args, "out", None) is not None:
        overrides["output_root"] = args.out
    return load_config_file(args.config, overrides)


def _cmd_generate(args) -> int:
    config = _load_config(args)
    records = generate_dataset(config, workers=args.workers)
    print(f"generated {len(records)} samples under {config.output_root}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    report = validate_dataset(args.root, fraction=args.fraction)
    print(f"checked {report.samples_checked} samples, {len(report.violations)} violations")
    for v in report.violations:
        print(f"  sample {v['index']}: {v['kind']}: {v['detail']}")
    return EXIT_OK if report.ok else EXIT_VIOLATIONS


def _cmd_stats(args) -> int:
    print(json.dumps(dataset_stats(args.root), indent=2))
    return EXIT_OK


def _cmd_preview(args) -> int:
    config = load_config_file(args.config)
    _, image, _, _, _ = build_sample(config, args.index)
    _write_png(Path(args.out), image)
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_score(args) -> int:
    pred_dir, gt_dir = Path(args.pred), Path(args.gt)
    names = sorted(p.name for p in gt_dir.glob("*.png"))
    if not names:
        print("no ground-truth masks found", file=sys.stderr)
        return EXIT_IO
    tally = ConfusionTally()
    for name in names:
        gt = cv2.imread(str(gt_dir / name), cv2.IMREAD_GRAYSCALE)
        pred = cv2.imread(str(pred_dir / name), cv2.IMREAD_GRAYSCALE)
        if gt is None or pred is None:
            print(f"missing or unreadable mask pair: {name}", file=sys.stderr)
            return EXIT_IO
        tally = accumulate(tally, pred, gt)
    acc = pixel_accuracy(tally)
    miou = mean_iou(tally)
    ious = per_class_iou(tally)
    lines = [f"{'class':<28} {'IoU':>8}"]
    for cid, iou in sorted(ious.items()):
        label = "background" if cid == 0 else LINE_CLASSES[cid - 1]
        lines.append(f"{label:<28} {iou:>8.4f}")
    lines.append(f"{'pixel accuracy':<28} {acc:>8.4f}")
    lines.append(f"{'mean IoU':<28} {miou:>8.4f}")
    table = "\n".join(lines)
    metrics = {"acc": acc, "miou": miou, "per_class_iou": {str(k): v for k, v in ious.items()}}
    Path(args.report).write_text(table + "\n\nMETRICS " + json.dumps(metrics, sort_keys=True) + "\n")
    print(table)
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    try:
        if args.command == "generate":
            return _cmd_generate(args)
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "stats":
            return _cmd_stats(args)
        if args.command == "preview":
            return _cmd_preview(args)
        if args.command == "score":
            return _cmd_score(args)
        return EXIT_USAGE
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except MissingManifestError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except (OSError, IOError) as e:
        print(f"io error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
