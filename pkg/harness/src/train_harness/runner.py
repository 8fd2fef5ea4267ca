"""Training protocols: baseline, synthetic_only, pretrain_finetune.

baseline trains on the real set from scratch; synthetic_only trains on the
synthetic set and leaves a checkpoint; pretrain_finetune initializes from
that checkpoint (building it first if absent) and then trains on the real
set. All three evaluate on the held-out test set. Per-epoch losses and the
final metrics are appended to a line-delimited log next to the checkpoint.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

import numpy as np
import torch
import torch.nn as nn
from torch.utils.data import DataLoader

from .config import ExperimentConfig, RunRecord
from .data import NUM_CLASSES, SegmentationDataset, load_real_annotations
from .metrics import confusion, mean_iou, pixel_accuracy
from .model import build_model

log = logging.getLogger(__name__)

PROTOCOLS = ("baseline", "synthetic_only", "pretrain_finetune")


class CheckpointMissingError(FileNotFoundError):
    pass


def _loader(config: ExperimentConfig, root, subset=None, seed=0, shuffle=True):
    index = load_real_annotations(root)
    if subset is not None:
        if subset > len(index):
            raise ValueError(f"subset {subset} > {len(index)} available samples")
        index = index[:subset]
    ds = SegmentationDataset(index, stroke_width=config.stroke_width)
    gen = torch.Generator().manual_seed(seed)
    return DataLoader(ds, batch_size=config.batch_size, shuffle=shuffle, generator=gen)

def _train(model, loader, config: ExperimentConfig, epochs: int) -> list[float]:
    weights = torch.ones(NUM_CLASSES)
    weights[0] = config.background_weight
    criterion = nn.CrossEntropyLoss(weight=weights)
    opt = torch.optim.SGD(model.parameters(), lr=config.lr,
                          momentum=config.momentum, weight_decay=config.weight_decay)
    total_steps = max(1, epochs * len(loader))
    step = 0
    curve = []
    model.train()
    for epoch in range(epochs):
        running = 0.0
        for images, masks in loader:
            for group in opt.param_groups:
                group["lr"] = config.lr * (1 - step / total_steps) ** config.lr_decay_power
            opt.zero_grad()
            loss = criterion(model(images), masks)
            loss.backward()
            opt.step()
            running += loss.item()
            step += 1
        curve.append(running / len(loader))
        log.info("epoch %d/%d mean loss %.4f", epoch + 1, epochs, curve[-1])
    return curve


@torch.no_grad()
def evaluate(model, loader) -> tuple[float, float]:
    model.eval()
    counts = None
    for images, masks in loader:
        pred = model(images).argmax(dim=1)
        counts = confusion(pred.numpy(), masks.numpy(), counts)
    return pixel_accuracy(counts), mean_iou(counts)


def _checkpoint_path(config: ExperimentConfig, protocol: str, seed: int) -> Path:
    return Path(config.out_dir) / f"{protocol}_seed{seed}.pt"


def run_protocol(config: ExperimentConfig, protocol: str, seed: int = 0) -> RunRecord:
    if protocol not in PROTOCOLS:
        raise ValueError(f"unknown protocol: {protocol!r} (expected one of {PROTOCOLS})")
    torch.manual_seed(seed)
    np.random.seed(seed)
    torch.use_deterministic_algorithms(True)

    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    model = build_model(config.model)
    curve = []

    if protocol == "synthetic_only":
        if config.synthetic_root is None:
            raise ValueError("synthetic_only requires synthetic_root")
        loader = _loader(config, config.synthetic_root, seed=seed)
        curve = _train(model, loader, config, config.pretrain_epochs or config.epochs)
    else:
        if protocol == "pretrain_finetune":
            ckpt = _checkpoint_path(config, "synthetic_only", seed)
            if not ckpt.exists():
                if config.synthetic_root is None:
                    raise CheckpointMissingError(
                        f"{ckpt}: no pretrained checkpoint and no synthetic_root to build one")
                run_protocol(config, "synthetic_only", seed)
                torch.manual_seed(seed)  # finetune stream independent of pretrain length
            model.load_state_dict(torch.load(ckpt, weights_only=True))
        loader = _loader(config, config.real_train_root,
                         subset=config.real_train_subset, seed=seed + 1)
        curve = _train(model, loader, config, config.epochs)

    test_loader = _loader(config, config.test_root, seed=seed, shuffle=False)
    acc, miou = evaluate(model, test_loader)

    ckpt = _checkpoint_path(config, protocol, seed)
    torch.save(model.state_dict(), ckpt)
    record = RunRecord(protocol=protocol, seed=seed, config_digest=config.digest(),
                       final_acc=acc, final_miou=miou, loss_curve=curve,
                       checkpoint=str(ckpt))
    log_path = ckpt.with_suffix(".metrics.jsonl")
    with open(log_path, "w") as f:
        for epoch, loss in enumerate(curve):
            f.write(json.dumps({"epoch": epoch, "loss": loss}) + "\n")
        f.write(json.dumps({"final": True, **record.to_dict()}) + "\n")
    return record
