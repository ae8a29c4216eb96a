"""Desk-scale convolutional classifier for grayscale scalogram images.

Three conv blocks feed two fully connected layers; adaptive pooling makes
the head independent of the input resolution. The conv stack can be
pretrained on procedurally generated ridge images and frozen, leaving only
the head trainable on real data.
"""

from __future__ import annotations

import numpy as np
import torch
from torch import nn

N_CLASSES = 3


class ScalogramCnn(nn.Module):
    def __init__(self, n_classes: int = N_CLASSES):
        super().__init__()
        self.features = nn.Sequential(
            nn.Conv2d(1, 16, kernel_size=5, padding=2),
            nn.ReLU(inplace=True),
            nn.MaxPool2d(2),
            nn.Conv2d(16, 32, kernel_size=3, padding=1),
            nn.ReLU(inplace=True),
            nn.MaxPool2d(2),
            nn.Conv2d(32, 64, kernel_size=3, padding=1),
            nn.ReLU(inplace=True),
            nn.AdaptiveAvgPool2d((4, 4)),
        )
        self.classifier = nn.Sequential(
            nn.Flatten(),
            nn.Linear(64 * 4 * 4, 128),
            nn.ReLU(inplace=True),
            nn.Linear(128, n_classes),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.classifier(self.features(x))

    def freeze_features(self) -> None:
        for param in self.features.parameters():
            param.requires_grad_(False)


def synthetic_ridge_images(
    n_images: int, size: tuple[int, int], seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Auxiliary pretraining set: horizontal ridges at class-banded heights.

    Stands in for the generic-feature corpus in the transfer-learning
    recipe: lower layers learn oriented-band detectors from these before
    the head ever sees real data.
    """
    rng = np.random.default_rng(seed)
    height, width = size
    images = np.empty((n_images, 1, height, width), dtype=np.float32)
    labels = rng.integers(0, N_CLASSES, size=n_images)
    rows = np.arange(height, dtype=np.float32)[:, None]
    for i, cls in enumerate(labels):
        band_lo = cls * height / 3.0
        center = band_lo + rng.uniform(0.15, 0.85) * height / 3.0
        thickness = rng.uniform(1.0, 0.08 * height)
        ridge = np.exp(-0.5 * ((rows - center) / thickness) ** 2)
        profile = rng.uniform(0.3, 1.0, size=(1, width)).astype(np.float32)
        image = ridge * profile + 0.05 * rng.normal(size=(height, width))
        lo, hi = image.min(), image.max()
        images[i, 0] = (image - lo) / (hi - lo) if hi > lo else 0.0
    return images, labels.astype(np.int64)
