"""Manifest, label, and score-file text formats shared with the encoder
toolkit."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np


def read_manifest_ids(path: str | Path) -> list[str]:
    """Sample ids from a manifest file; '#' lines are headers."""
    ids = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            ids.append(line)
    return ids


def read_labels(path: str | Path) -> dict[str, str]:
    """Read 'sample_id label' pairs, one per line."""
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


def write_scores(
    sample_ids: Sequence[str],
    scores: np.ndarray,
    class_labels: Sequence[str],
    path: str | Path,
) -> None:
    """Write the score table: header 'sample_id <labels>', one row per sample."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.shape != (len(sample_ids), len(class_labels)):
        raise ValueError(
            f"scores must have shape ({len(sample_ids)}, {len(class_labels)}), "
            f"got {scores.shape}"
        )
    lines = ["sample_id " + " ".join(str(c) for c in class_labels)]
    for sid, row in zip(sample_ids, scores):
        lines.append(str(sid) + " " + " ".join(repr(float(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")
