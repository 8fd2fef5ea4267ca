"""Model presets.

"toy" is a small strided encoder-decoder that trains on a CPU in minutes;
"paper" is DeepLabV3 with a ResNet-101 backbone via torchvision. Both take
RGB float tensors and emit per-pixel logits over the 27 classes.
"""

from __future__ import annotations

import torch
import torch.nn as nn
import torch.nn.functional as F

from .data import NUM_CLASSES


class ToySegNet(nn.Module):
    def __init__(self, num_classes: int = NUM_CLASSES, width: int = 16):
        super().__init__()
        c = width
        self.encoder = nn.Sequential(
            nn.Conv2d(3, c, 3, stride=2, padding=1), nn.BatchNorm2d(c), nn.ReLU(inplace=True),
            nn.Conv2d(c, 2 * c, 3, stride=2, padding=1), nn.BatchNorm2d(2 * c), nn.ReLU(inplace=True),
            nn.Conv2d(2 * c, 4 * c, 3, stride=2, padding=1), nn.BatchNorm2d(4 * c), nn.ReLU(inplace=True),
            nn.Conv2d(4 * c, 4 * c, 3, padding=1), nn.BatchNorm2d(4 * c), nn.ReLU(inplace=True),
        )
        self.head = nn.Conv2d(4 * c, num_classes, 1)

    def forward(self, x):
        logits = self.head(self.encoder(x))
        return F.interpolate(logits, size=x.shape[-2:], mode="bilinear", align_corners=False)


def build_model(preset: str, num_classes: int = NUM_CLASSES) -> nn.Module:
    if preset == "toy":
        return ToySegNet(num_classes)
    if preset == "paper":
        from torchvision.models.segmentation import deeplabv3_resnet101

        model = deeplabv3_resnet101(weights=None, num_classes=num_classes)

        class _Wrapped(nn.Module):
            def __init__(self, inner):
                super().__init__()
                self.inner = inner

            def forward(self, x):
                return self.inner(x)["out"]

        return _Wrapped(model)
    raise ValueError(f"unknown model preset: {preset!r}")
