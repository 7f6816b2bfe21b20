"""Score-level late fusion and per-class (macro) accuracy.

Score files are plain text tables: a header line ``sample_id`` followed by
the class labels, then one row per sample with the id and one score per
class.  Scores are written with full float repr so files round-trip
exactly.  Label files map ``sample_id label``, one pair per line.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np


@dataclass(frozen=True)
class ScoreMatrix:
    """Per-sample class scores: rows align with sample_ids."""

    sample_ids: tuple[str, ...]
    scores: np.ndarray
    class_labels: tuple[str, ...]

    def __post_init__(self) -> None:
        ids = tuple(str(s) for s in self.sample_ids)
        labels = tuple(str(c) for c in self.class_labels)
        scores = np.asarray(self.scores, dtype=np.float64)
        if len(labels) < 2:
            raise ValueError("need at least 2 classes")
        if scores.ndim != 2 or scores.shape != (len(ids), len(labels)):
            raise ValueError(
                f"scores must have shape ({len(ids)}, {len(labels)}), got {scores.shape}"
            )
        if not np.isfinite(scores).all():
            raise ValueError("scores must be finite")
        for token in ids + labels:
            if not token or any(ch.isspace() for ch in token):
                raise ValueError(
                    f"ids and class labels must be non-empty and whitespace-free: {token!r}"
                )
        object.__setattr__(self, "sample_ids", ids)
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "class_labels", labels)


@dataclass(frozen=True)
class AccuracyReport:
    """Per-class recognition accuracies and their unweighted mean."""

    per_class: dict[str, float]
    mean_accuracy: float


def _check_aligned(a: ScoreMatrix, b: ScoreMatrix) -> None:
    if a.class_labels != b.class_labels:
        for i, (x, y) in enumerate(zip(a.class_labels, b.class_labels)):
            if x != y:
                raise ValueError(f"class label mismatch at column {i}: {x!r} vs {y!r}")
        raise ValueError(
            f"class count mismatch: {len(a.class_labels)} vs {len(b.class_labels)}"
        )
    if a.sample_ids != b.sample_ids:
        for i, (x, y) in enumerate(zip(a.sample_ids, b.sample_ids)):
            if x != y:
                raise ValueError(f"sample id mismatch at row {i}: {x!r} vs {y!r}")
        raise ValueError(
            f"sample count mismatch: {len(a.sample_ids)} vs {len(b.sample_ids)}"
        )


def late_fuse(matrices: Sequence[ScoreMatrix]) -> ScoreMatrix:
    """Non-weighted combination: the elementwise mean of the score arrays.

    All inputs must share sample ids (same order) and class labels.
    """
    mats = list(matrices)
    if not mats:
        raise ValueError("no score matrices to fuse")
    first = mats[0]
    for other in mats[1:]:
        _check_aligned(first, other)
    fused = np.mean(np.stack([m.scores for m in mats], axis=0), axis=0)
    return ScoreMatrix(first.sample_ids, fused, first.class_labels)


def per_class_accuracy(
    preds: ScoreMatrix, labels: Mapping[str, str]
) -> AccuracyReport:
    """Average recognition across classes.

    Prediction is the per-row argmax (ties go to the lowest class index);
    per-class accuracy is correct/total within that class; the mean is the
    unweighted average over classes that have at least one sample.
    """
    for sid in preds.sample_ids:
        if sid not in labels:
            raise ValueError(f"unlabeled sample {sid!r}")
    picks = np.argmax(preds.scores, axis=1)
    totals: dict[str, int] = {}
    hits: dict[str, int] = {}
    for sid, pick in zip(preds.sample_ids, picks):
        truth = str(labels[sid])
        totals[truth] = totals.get(truth, 0) + 1
        if truth == preds.class_labels[pick]:
            hits[truth] = hits.get(truth, 0) + 1
    per_class = {cls: hits.get(cls, 0) / total for cls, total in sorted(totals.items())}
    mean = sum(per_class.values()) / len(per_class) if per_class else 0.0
    return AccuracyReport(per_class, mean)


def write_scores(matrix: ScoreMatrix, path: str | Path) -> None:
    """Write a score matrix as a text table (exact float round-trip)."""
    lines = ["sample_id " + " ".join(matrix.class_labels)]
    for sid, row in zip(matrix.sample_ids, matrix.scores):
        lines.append(sid + " " + " ".join(repr(float(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_scores(path: str | Path) -> ScoreMatrix:
    """Read a score table written by ``write_scores``."""
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty score file")
    header = lines[0].split()
    if header[:1] != ["sample_id"] or len(header) < 3:
        raise ValueError(f"{path}: malformed score header")
    class_labels = tuple(header[1:])
    ids: list[str] = []
    rows: list[list[float]] = []
    for n, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if len(parts) != 1 + len(class_labels):
            raise ValueError(
                f"{path}:{n}: expected {1 + len(class_labels)} fields, got {len(parts)}"
            )
        ids.append(parts[0])
        try:
            rows.append([float(v) for v in parts[1:]])
        except ValueError:
            raise ValueError(f"{path}:{n}: non-numeric score") from None
    scores = np.array(rows, dtype=np.float64).reshape(len(ids), len(class_labels))
    return ScoreMatrix(tuple(ids), scores, class_labels)


def read_labels(path: str | Path) -> dict[str, str]:
    """Read a ``sample_id label`` map, skipping blanks and '#' comments."""
    out: dict[str, str] = {}
    for n, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"{path}:{n}: expected 'sample_id label'")
        out[parts[0]] = parts[1]
    return out


def write_labels(labels: Mapping[str, str], path: str | Path) -> None:
    lines = [f"{sid} {cls}" for sid, cls in labels.items()]
    Path(path).write_text("\n".join(lines) + "\n")
