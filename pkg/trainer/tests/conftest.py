"""Shared fixtures."""

from __future__ import annotations

import numpy as np
import pytest

from util_trainer import write_labels, write_manifest, write_tensor_file


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture
def small_dataset(tmp_path, rng):
    """Eight 16x16x2 tensors in two trivially separable classes."""
    tensor_dir = tmp_path / "tensors"
    tensor_dir.mkdir()
    ids, labels = [], {}
    for i in range(8):
        cls = i % 2
        values = rng.uniform(0, 0.1, (16, 16, 2)).astype(np.float32)
        values[:, :, cls] += 0.8  # class signature on one channel
        values = np.clip(values, 0.0, 1.0)
        sid = f"mini{i}"
        write_tensor_file(tensor_dir / f"{sid}.tensor", values)
        ids.append(sid)
        labels[sid] = f"c{cls}"
    manifest = tmp_path / "train.manifest"
    write_manifest(manifest, ids)
    labels_path = tmp_path / "labels.txt"
    write_labels(labels_path, labels)
    return tensor_dir, manifest, labels_path, ids
