"""Training and evaluation over tensor-file datasets.

Given a fixed seed the run is deterministic on CPU (modulo torch backend
nondeterminism on other devices).  Checkpoints are written atomically
(temp file + rename) and carry the model spec, class labels, and expected
input shape.
"""

from __future__ import annotations

import os
from dataclasses import asdict
from pathlib import Path

import numpy as np
import torch
from torch import nn

from .model import ModelSpec, TinyConvNet
from .tensor_file import read_tensor_file
from .textio import read_labels, read_manifest_ids, write_scores


def _load_dataset(
    manifest_path: str | Path, tensor_dir: str | Path
) -> tuple[list[str], torch.Tensor]:
    """Load every manifest sample's tensor as (N, channels, rows, width)."""
    ids = read_manifest_ids(manifest_path)
    if not ids:
        raise ValueError(f"{manifest_path}: manifest lists no samples")
    tensor_dir = Path(tensor_dir)
    missing = [sid for sid in ids if not (tensor_dir / f"{sid}.tensor").exists()]
    if missing:
        raise ValueError(f"missing tensor file for sample {missing[0]!r} in {tensor_dir}")
    arrays = []
    shape = None
    for sid in ids:
        values, _ = read_tensor_file(tensor_dir / f"{sid}.tensor")
        if shape is None:
            shape = values.shape
        elif values.shape != shape:
            raise ValueError(
                f"sample {sid!r} has shape {values.shape}, expected {shape}"
            )
        arrays.append(np.transpose(values, (2, 0, 1)))  # (channels, rows, width)
    batch = torch.from_numpy(np.stack(arrays, axis=0))
    return ids, batch


def train(
    manifest_path: str | Path,
    tensor_dir: str | Path,
    labels_path: str | Path,
    spec: ModelSpec,
    seed: int,
    checkpoint_path: str | Path,
    log_path: str | Path | None = None,
) -> list[dict]:
    """Train the tiny CNN; returns the per-epoch history.

    All preconditions (tensors present, labels present, channel counts
    matching) are checked before the first optimization step.
    """
    ids, inputs = _load_dataset(manifest_path, tensor_dir)
    labels = read_labels(labels_path)
    unlabeled = [sid for sid in ids if sid not in labels]
    if unlabeled:
        raise ValueError(f"missing label for sample {unlabeled[0]!r}")
    channels = inputs.shape[1]
    if channels != spec.in_channels:
        raise ValueError(
            f"model expects {spec.in_channels} input channels but tensor files "
            f"have {channels}"
        )
    classes = sorted({labels[sid] for sid in ids})
    if len(classes) != spec.num_classes:
        raise ValueError(
            f"model expects {spec.num_classes} classes but labels define {len(classes)}"
        )
    class_index = {cls: i for i, cls in enumerate(classes)}
    targets = torch.tensor([class_index[labels[sid]] for sid in ids], dtype=torch.long)

    torch.manual_seed(seed)
    model = TinyConvNet(spec, inputs.shape[2], inputs.shape[3])
    optimizer = torch.optim.Adam(model.parameters(), lr=spec.learning_rate)
    loss_fn = nn.CrossEntropyLoss()
    shuffler = torch.Generator().manual_seed(seed)

    history: list[dict] = []
    count = len(ids)
    for epoch in range(1, spec.epochs + 1):
        model.train()
        order = torch.randperm(count, generator=shuffler)
        epoch_loss = 0.0
        correct = 0
        for start in range(0, count, spec.batch_size):
            batch_idx = order[start : start + spec.batch_size]
            batch_in = inputs[batch_idx]
            batch_target = targets[batch_idx]
            optimizer.zero_grad()
            logits = model(batch_in)
            loss = loss_fn(logits, batch_target)
            loss.backward()
            optimizer.step()
            epoch_loss += loss.item() * len(batch_idx)
            correct += int((logits.argmax(dim=1) == batch_target).sum())
        history.append(
            {
                "epoch": epoch,
                "loss": epoch_loss / count,
                "accuracy": correct / count,
            }
        )

    checkpoint_path = Path(checkpoint_path)
    checkpoint_path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "state_dict": model.state_dict(),
        "spec": asdict(spec),
        "classes": classes,
        "input_shape": tuple(inputs.shape[1:]),
    }
    tmp_path = checkpoint_path.with_suffix(checkpoint_path.suffix + ".tmp")
    torch.save(payload, tmp_path)
    os.replace(tmp_path, checkpoint_path)

    if log_path is None:
        log_path = checkpoint_path.with_suffix(".log")
    lines = [
        f"epoch {h['epoch']} loss {h['loss']:.6f} accuracy {h['accuracy']:.6f}"
        for h in history
    ]
    Path(log_path).write_text("\n".join(lines) + "\n")
    return history


def load_checkpoint(path: str | Path) -> tuple[TinyConvNet, list[str], tuple[int, ...]]:
    payload = torch.load(path, map_location="cpu", weights_only=False)
    spec = ModelSpec(**payload["spec"])
    channels, height, width = payload["input_shape"]
    model = TinyConvNet(spec, height, width)
    model.load_state_dict(payload["state_dict"])
    model.eval()
    return model, list(payload["classes"]), tuple(payload["input_shape"])


def evaluate(
    checkpoint_path: str | Path,
    manifest_path: str | Path,
    tensor_dir: str | Path,
    scores_path: str | Path,
) -> tuple[list[str], np.ndarray, list[str]]:
    """Score every manifest sample and write the score file.

    Rows follow the manifest order; scores are softmax probabilities.
    """
    model, classes, input_shape = load_checkpoint(checkpoint_path)
    ids, inputs = _load_dataset(manifest_path, tensor_dir)
    if tuple(inputs.shape[1:]) != input_shape:
        raise ValueError(
            f"checkpoint expects input shape {input_shape} but tensor files "
            f"have {tuple(inputs.shape[1:])}"
        )
    with torch.no_grad():
        scores = torch.softmax(model(inputs), dim=1).numpy().astype(np.float64)
    write_scores(ids, scores, classes, scores_path)
    return ids, scores, classes
