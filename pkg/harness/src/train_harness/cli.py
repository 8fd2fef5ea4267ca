"""Command-line interface: train a protocol or evaluate a checkpoint."""

from __future__ import annotations

import argparse
import json
import logging
import sys

import torch

from .config import ConfigError, load_config_file
from .data import DatasetFormatError
from .runner import PROTOCOLS, evaluate, run_protocol, _loader
from .model import build_model


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="train-harness", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="run one training protocol")
    t.add_argument("--config", required=True)
    t.add_argument("--protocol", required=True, choices=PROTOCOLS)
    t.add_argument("--seed", type=int, default=0)

    e = sub.add_parser("evaluate", help="score a checkpoint on a test directory")
    e.add_argument("--checkpoint", required=True)
    e.add_argument("--test", required=True)
    e.add_argument("--config", required=True, help="config (model preset, stroke width)")
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = _build_parser().parse_args(argv)
    try:
        config = load_config_file(args.config)
        if args.command == "train":
            record = run_protocol(config, args.protocol, seed=args.seed)
            print(json.dumps(record.to_dict(), indent=2))
            return 0
        model = build_model(config.model)
        model.load_state_dict(torch.load(args.checkpoint, weights_only=True))
        acc, miou = evaluate(model, _loader(config, args.test, shuffle=False))
        print(json.dumps({"acc": acc, "miou": miou}))
        return 0
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except (DatasetFormatError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
