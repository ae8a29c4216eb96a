"""Readers for the toolkit's exported image artifacts.

Two file contracts, implemented here against their documented formats (no
dependency on the exporting package):

* image manifest: JSON lines, one record per event with keys event_id,
  image (path, relative to the manifest directory unless absolute),
  speed_class (C30/C40/C50) and speed_kmh;
* image tensor: 8-byte header of two little-endian uint32 (height, width)
  followed by height*width little-endian float32, row-major.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

CLASS_NAMES = ("C30", "C40", "C50")
CLASS_INDEX = {name: i for i, name in enumerate(CLASS_NAMES)}


class DataError(Exception):
    """Malformed manifest or tensor file."""


def load_image_tensor(path: str | Path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < 8:
        raise DataError(f"{path}: truncated tensor header")
    height, width = struct.unpack("<II", raw[:8])
    expected = 8 + 4 * height * width
    if len(raw) != expected:
        raise DataError(
            f"{path}: size mismatch, header says {height}x{width} "
            f"({expected} bytes) but file has {len(raw)}"
        )
    return np.frombuffer(raw[8:], dtype="<f4").reshape(height, width)


@dataclass(frozen=True)
class ImageDataset:
    """All images stacked as (n, 1, H, W) float32 plus integer labels."""

    images: np.ndarray
    labels: np.ndarray
    event_ids: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def image_size(self) -> tuple[int, int]:
        return self.images.shape[2], self.images.shape[3]


def load_dataset(manifest_path: str | Path) -> ImageDataset:
    manifest_path = Path(manifest_path)
    base = manifest_path.parent
    images, labels, event_ids = [], [], []
    shape = None
    with manifest_path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                event_id = rec["event_id"]
                image_path = Path(rec["image"])
                speed_class = rec["speed_class"]
            except (json.JSONDecodeError, KeyError) as exc:
                raise DataError(f"{manifest_path}:{lineno}: bad record: {exc}") from exc
            if speed_class not in CLASS_INDEX:
                continue  # Excluded events never reach training
            if not image_path.is_absolute():
                image_path = base / image_path
            image = load_image_tensor(image_path)
            if shape is None:
                shape = image.shape
            elif image.shape != shape:
                raise DataError(
                    f"{image_path}: shape {image.shape} differs from first image {shape}"
                )
            images.append(image)
            labels.append(CLASS_INDEX[speed_class])
            event_ids.append(event_id)
    if not images:
        raise DataError(f"{manifest_path}: no usable records")
    stacked = np.stack(images).astype(np.float32)[:, None, :, :]
    return ImageDataset(
        images=stacked, labels=np.asarray(labels, dtype=np.int64), event_ids=tuple(event_ids)
    )
