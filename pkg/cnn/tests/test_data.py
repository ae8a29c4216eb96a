"""Tensor-file and manifest readers against their documented formats."""

import json
import struct

import numpy as np
import pytest

from peh_cnn.data import DataError, load_dataset, load_image_tensor


def write_tensor(path, image: np.ndarray) -> None:
    height, width = image.shape
    with path.open("wb") as fh:
        fh.write(struct.pack("<II", height, width))
        fh.write(np.ascontiguousarray(image, dtype="<f4").tobytes())


def write_manifest(path, records) -> None:
    with path.open("w") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")


def test_tensor_round_trip(tmp_path):
    image = np.random.default_rng(0).uniform(size=(12, 18)).astype(np.float32)
    path = tmp_path / "img.f32"
    write_tensor(path, image)
    loaded = load_image_tensor(path)
    assert loaded.shape == (12, 18)
    assert np.array_equal(loaded, image)


def test_tensor_size_mismatch_rejected(tmp_path):
    path = tmp_path / "bad.f32"
    with path.open("wb") as fh:
        fh.write(struct.pack("<II", 4, 4))
        fh.write(b"\x00" * 10)  # not 4*16 bytes
    with pytest.raises(DataError):
        load_image_tensor(path)


def test_dataset_loads_and_skips_excluded(tmp_path):
    rng = np.random.default_rng(1)
    records = []
    for i, cls in enumerate(["C30", "C40", "C50", "Excluded"]):
        img_path = tmp_path / f"ev{i}.f32"
        write_tensor(img_path, rng.uniform(size=(8, 8)).astype(np.float32))
        records.append(
            {"event_id": f"ev{i}", "image": f"ev{i}.f32", "speed_class": cls, "speed_kmh": 35.0}
        )
    manifest = tmp_path / "images.jsonl"
    write_manifest(manifest, records)
    ds = load_dataset(manifest)
    assert len(ds) == 3  # Excluded dropped
    assert ds.images.shape == (3, 1, 8, 8)
    assert sorted(ds.labels.tolist()) == [0, 1, 2]


def test_shape_mismatch_across_images_rejected(tmp_path):
    rng = np.random.default_rng(2)
    write_tensor(tmp_path / "a.f32", rng.uniform(size=(8, 8)).astype(np.float32))
    write_tensor(tmp_path / "b.f32", rng.uniform(size=(9, 8)).astype(np.float32))
    manifest = tmp_path / "images.jsonl"
    write_manifest(
        manifest,
        [
            {"event_id": "a", "image": "a.f32", "speed_class": "C30", "speed_kmh": 33.0},
            {"event_id": "b", "image": "b.f32", "speed_class": "C40", "speed_kmh": 45.0},
        ],
    )
    with pytest.raises(DataError):
        load_dataset(manifest)


def test_empty_manifest_rejected(tmp_path):
    manifest = tmp_path / "images.jsonl"
    manifest.write_text("")
    with pytest.raises(DataError):
        load_dataset(manifest)
