"""Skeleton sequence ingestion, body selection, and evaluation protocol manifests.

Two input formats are supported:

* NTU-style ``.skeleton`` text: line 1 is the frame count; each frame starts
  with a body count, followed per body by a header line (first field is the
  body id) and 25 joint lines whose first three whitespace-separated fields
  are the x, y, z camera-space coordinates in meters.  Dataset distributions
  carry an extra joint-count line between the body header and the joint
  lines; it is accepted and validated when present.
* A JSON interchange document with fields
  ``{sample_id, T, bodies: [{body_id, present, frames}], metadata}`` where
  ``frames`` is a T x 25 x 3 nested list and ``present`` flags the frames in
  which the body was actually observed.  ``write_interchange`` /
  ``parse_interchange`` round-trip losslessly.

Non-finite coordinates are hard parse errors: corrupted input fails loudly
before any encoding happens.
"""

from __future__ import annotations

import json
import re
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

NUM_JOINTS = 25

PROTOCOLS = ("cross-subject", "cross-view", "cross-setup")

_NTU_NAME_RE = re.compile(r"S(\d+)C(\d+)P(\d+)R(\d+)A(\d+)", re.IGNORECASE)


class SkeletonParseError(ValueError):
    """Malformed skeleton input (raw capture text or interchange document)."""


@dataclass(frozen=True)
class SampleMeta:
    """Optional per-sample annotations used by the protocol splits."""

    action: int | None = None
    subject: int | None = None
    camera: int | None = None
    setup: int | None = None


@dataclass(frozen=True)
class BodyTrack:
    """One tracked body, aligned to the global frame index of its sequence.

    ``frames`` has shape (T, 25, 3); ``present[t]`` is False where the body
    was not observed at frame t (those rows hold placeholder zeros until the
    track is densified by ``densify_track``).
    """

    body_id: str
    frames: np.ndarray
    present: np.ndarray

    def __post_init__(self) -> None:
        frames = np.asarray(self.frames, dtype=np.float64)
        present = np.asarray(self.present, dtype=bool)
        if frames.ndim != 3 or frames.shape[1:] != (NUM_JOINTS, 3):
            raise ValueError(
                f"body {self.body_id!r}: frames must have shape (T, {NUM_JOINTS}, 3), "
                f"got {frames.shape}"
            )
        if frames.shape[0] < 1:
            raise ValueError(f"body {self.body_id!r}: needs at least one frame")
        if present.shape != (frames.shape[0],):
            raise ValueError(
                f"body {self.body_id!r}: present mask must have one entry per frame"
            )
        if not present.any():
            raise ValueError(f"body {self.body_id!r}: never observed in any frame")
        if not np.isfinite(frames).all():
            raise ValueError(f"body {self.body_id!r}: non-finite joint coordinates")
        object.__setattr__(self, "body_id", str(self.body_id))
        object.__setattr__(self, "frames", frames)
        object.__setattr__(self, "present", present)

    @classmethod
    def dense(cls, body_id: str, frames: np.ndarray) -> "BodyTrack":
        """Build a track that is observed in every frame."""
        frames = np.asarray(frames, dtype=np.float64)
        return cls(body_id, frames, np.ones(frames.shape[0], dtype=bool))

    @property
    def frame_count(self) -> int:
        return self.frames.shape[0]


@dataclass(frozen=True)
class SkeletonSequence:
    """All tracked bodies of one clip, plus sample-level metadata."""

    sample_id: str
    frame_count: int
    bodies: tuple[BodyTrack, ...]
    metadata: SampleMeta = field(default_factory=SampleMeta)

    def __post_init__(self) -> None:
        object.__setattr__(self, "bodies", tuple(self.bodies))
        if self.frame_count < 1:
            raise ValueError("frame count must be positive")
        for body in self.bodies:
            if body.frame_count != self.frame_count:
                raise ValueError(
                    f"body {body.body_id!r} has {body.frame_count} frames, "
                    f"sequence has {self.frame_count}"
                )


def metadata_from_ntu_name(name: str) -> SampleMeta:
    """Extract setup/camera/subject/action ids from an NTU-style sample name.

    Returns an empty SampleMeta when the name does not follow the
    S***C***P***R***A*** convention.
    """
    match = _NTU_NAME_RE.search(name)
    if not match:
        return SampleMeta()
    setup, camera, subject, _, action = (int(g) for g in match.groups())
    return SampleMeta(action=action, subject=subject, camera=camera, setup=setup)


def parse_ntu_skeleton(text: str, sample_id: str = "") -> SkeletonSequence:
    """Parse NTU-style ``.skeleton`` text into a SkeletonSequence.

    Bodies are aligned to the global frame index; frames in which a body id
    does not appear are flagged absent.  Errors carry the 1-based line
    number of the offending input line.
    """
    lines = text.splitlines()
    pos = 0

    def take_line(what: str) -> str:
        nonlocal pos
        if pos >= len(lines):
            raise SkeletonParseError(
                f"line {pos + 1}: unexpected end of file while reading {what}"
            )
        line = lines[pos]
        pos += 1
        return line

    def take_int(what: str) -> int:
        line = take_line(what).strip()
        try:
            return int(line)
        except ValueError:
            raise SkeletonParseError(
                f"line {pos}: expected integer {what}, got {line!r}"
            ) from None

    frame_count = take_int("frame count")
    if frame_count < 1:
        raise SkeletonParseError("line 1: frame count must be positive")

    frames_by_body: dict[str, np.ndarray] = {}
    present_by_body: dict[str, np.ndarray] = {}

    for t in range(frame_count):
        body_count = take_int(f"body count for frame {t}")
        if body_count < 0:
            raise SkeletonParseError(f"line {pos}: negative body count in frame {t}")
        for _ in range(body_count):
            header = take_line(f"body header in frame {t}").split()
            if not header:
                raise SkeletonParseError(f"line {pos}: empty body header in frame {t}")
            body_id = header[0]
            # Dataset files interpose a joint-count line; handcrafted minimal
            # files may go straight to the joint coordinates.
            if pos < len(lines):
                tokens = lines[pos].split()
                if len(tokens) == 1:
                    declared = take_int(f"joint count in frame {t}")
                    if declared != NUM_JOINTS:
                        raise SkeletonParseError(
                            f"line {pos}: frame {t}: expected {NUM_JOINTS} joints, "
                            f"got {declared}"
                        )
            joints = np.empty((NUM_JOINTS, 3), dtype=np.float64)
            for j in range(NUM_JOINTS):
                fields = take_line(f"joint {j + 1} of frame {t}").split()
                if len(fields) < 3:
                    raise SkeletonParseError(
                        f"line {pos}: frame {t}: joint line needs at least 3 "
                        f"coordinate fields, got {len(fields)}"
                    )
                try:
                    xyz = [float(fields[axis]) for axis in range(3)]
                except ValueError:
                    raise SkeletonParseError(
                        f"line {pos}: frame {t}: non-numeric joint coordinate"
                    ) from None
                if not all(np.isfinite(xyz)):
                    raise SkeletonParseError(
                        f"line {pos}: frame {t}: non-finite joint coordinate"
                    )
                joints[j] = xyz
            if body_id not in frames_by_body:
                frames_by_body[body_id] = np.zeros(
                    (frame_count, NUM_JOINTS, 3), dtype=np.float64
                )
                present_by_body[body_id] = np.zeros(frame_count, dtype=bool)
            if present_by_body[body_id][t]:
                raise SkeletonParseError(
                    f"line {pos}: duplicate body id {body_id!r} in frame {t}"
                )
            frames_by_body[body_id][t] = joints
            present_by_body[body_id][t] = True

    while pos < len(lines) and not lines[pos].strip():
        pos += 1
    if pos < len(lines):
        raise SkeletonParseError(f"line {pos + 1}: unexpected trailing content")
    if not frames_by_body:
        raise SkeletonParseError("sequence has no bodies")

    bodies = tuple(
        BodyTrack(body_id, frames_by_body[body_id], present_by_body[body_id])
        for body_id in sorted(frames_by_body)
    )
    return SkeletonSequence(
        sample_id=sample_id,
        frame_count=frame_count,
        bodies=bodies,
        metadata=metadata_from_ntu_name(sample_id),
    )


def write_interchange(seq: SkeletonSequence) -> str:
    """Serialize a sequence to the JSON interchange format (lossless)."""
    doc = {
        "sample_id": seq.sample_id,
        "T": seq.frame_count,
        "bodies": [
            {
                "body_id": body.body_id,
                "present": body.present.tolist(),
                "frames": body.frames.tolist(),
            }
            for body in seq.bodies
        ],
        "metadata": {
            "action": seq.metadata.action,
            "subject": seq.metadata.subject,
            "camera": seq.metadata.camera,
            "setup": seq.metadata.setup,
        },
    }
    return json.dumps(doc)


def parse_interchange(text: str) -> SkeletonSequence:
    """Parse a JSON interchange document written by ``write_interchange``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SkeletonParseError(f"invalid interchange JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SkeletonParseError("interchange document must be a JSON object")
    for key in ("sample_id", "T", "bodies"):
        if key not in doc:
            raise SkeletonParseError(f"interchange document missing field {key!r}")
    frame_count = doc["T"]
    if not isinstance(frame_count, int) or frame_count < 1:
        raise SkeletonParseError("field 'T' must be a positive integer")
    raw_bodies = doc["bodies"]
    if not isinstance(raw_bodies, list):
        raise SkeletonParseError("field 'bodies' must be a list")
    if not raw_bodies:
        raise SkeletonParseError("sequence has no bodies")

    bodies = []
    for i, entry in enumerate(raw_bodies):
        if not isinstance(entry, dict) or "body_id" not in entry or "frames" not in entry:
            raise SkeletonParseError(f"body {i}: needs 'body_id' and 'frames' fields")
        frames = np.asarray(entry["frames"], dtype=np.float64)
        if frames.shape != (frame_count, NUM_JOINTS, 3):
            raise SkeletonParseError(
                f"body {i}: frames must have shape ({frame_count}, {NUM_JOINTS}, 3), "
                f"got {frames.shape}"
            )
        present = entry.get("present")
        if present is None:
            present = np.ones(frame_count, dtype=bool)
        else:
            present = np.asarray(present, dtype=bool)
        try:
            bodies.append(BodyTrack(str(entry["body_id"]), frames, present))
        except ValueError as exc:
            raise SkeletonParseError(str(exc)) from None

    meta_doc = doc.get("metadata") or {}
    if not isinstance(meta_doc, dict):
        raise SkeletonParseError("field 'metadata' must be an object")
    meta_fields = {}
    for key in ("action", "subject", "camera", "setup"):
        value = meta_doc.get(key)
        if value is not None and not isinstance(value, int):
            raise SkeletonParseError(f"metadata field {key!r} must be an integer or null")
        meta_fields[key] = value
    return SkeletonSequence(
        sample_id=str(doc["sample_id"]),
        frame_count=frame_count,
        bodies=tuple(bodies),
        metadata=SampleMeta(**meta_fields),
    )


def densify_track(track: BodyTrack) -> BodyTrack:
    """Fill absent frames by repeating the last observed frame.

    A leading gap (body not yet observed) is backfilled from the first
    observed frame, so filled frames never introduce artificial motion.
    """
    if track.present.all():
        return track
    indices = np.where(track.present, np.arange(track.frame_count), -1)
    fill = np.maximum.accumulate(indices)
    first = int(np.flatnonzero(track.present)[0])
    fill = np.where(fill < 0, first, fill)
    return BodyTrack(
        track.body_id, track.frames[fill], np.ones(track.frame_count, dtype=bool)
    )


def motion_energy(track: BodyTrack) -> float:
    """Total squared consecutive-frame joint displacement of a track."""
    diffs = np.diff(track.frames, axis=0)
    return float(np.sum(diffs * diffs))


def select_bodies(seq: SkeletonSequence, max_bodies: int) -> list[BodyTrack]:
    """Pick up to ``max_bodies`` tracks, most-moving first.

    Tracks are densified to the full sequence length, ranked by descending
    motion energy (ties broken by ascending body id), and truncated to
    ``max_bodies``.  Acting subjects therefore outrank stationary noise
    tracks.
    """
    if max_bodies < 1:
        raise ValueError("max_bodies must be >= 1")
    if not seq.bodies:
        raise ValueError("sequence has no bodies")
    dense = [densify_track(body) for body in seq.bodies]
    ranked = sorted(dense, key=lambda b: (-motion_energy(b), b.body_id))
    return ranked[:max_bodies]


@dataclass(frozen=True)
class SampleInfo:
    """Metadata row used to build protocol manifests."""

    sample_id: str
    subject: str | None = None
    camera: str | None = None
    setup: int | None = None


@dataclass(frozen=True)
class DatasetManifest:
    """Train/test sample-id split under one evaluation protocol."""

    protocol: str
    train_ids: tuple[str, ...]
    test_ids: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.protocol!r}")
        object.__setattr__(self, "train_ids", tuple(self.train_ids))
        object.__setattr__(self, "test_ids", tuple(self.test_ids))
        overlap = set(self.train_ids) & set(self.test_ids)
        if overlap:
            raise ValueError(f"train/test overlap: {sorted(overlap)[:3]}")


def build_manifest(
    samples: Sequence[SampleInfo],
    protocol: str,
    *,
    train_subjects: Iterable[str] | None = None,
    test_camera: str | None = None,
) -> DatasetManifest:
    """Split samples into train/test ids under an evaluation protocol.

    cross-subject: train iff the sample's subject is in ``train_subjects``.
    cross-view: the single ``test_camera`` goes to test, all others to train.
    cross-setup: even setup ids train, odd setup ids test.
    """
    if protocol not in PROTOCOLS:
        raise ValueError(f"unknown protocol {protocol!r}")
    ids = [s.sample_id for s in samples]
    if len(set(ids)) != len(ids):
        duplicate = next(i for i in ids if ids.count(i) > 1)
        raise ValueError(f"duplicate sample id {duplicate!r}")

    if protocol == "cross-subject" and train_subjects is None:
        raise ValueError("cross-subject split needs a train_subjects set")
    if protocol == "cross-view" and test_camera is None:
        raise ValueError("cross-view split needs a test_camera")
    train_set = set(train_subjects) if train_subjects is not None else set()

    train: list[str] = []
    test: list[str] = []
    for sample in samples:
        if protocol == "cross-subject":
            if sample.subject is None:
                raise ValueError(f"sample {sample.sample_id!r} is missing subject metadata")
            is_train = sample.subject in train_set
        elif protocol == "cross-view":
            if sample.camera is None:
                raise ValueError(f"sample {sample.sample_id!r} is missing camera metadata")
            is_train = sample.camera != test_camera
        else:  # cross-setup
            if sample.setup is None:
                raise ValueError(f"sample {sample.sample_id!r} is missing setup metadata")
            is_train = sample.setup % 2 == 0
        (train if is_train else test).append(sample.sample_id)

    if samples and not test:
        warnings.warn(f"{protocol} split leaves the test set empty", stacklevel=2)
    if samples and not train:
        warnings.warn(f"{protocol} split leaves the training set empty", stacklevel=2)
    return DatasetManifest(protocol, tuple(train), tuple(test))


def write_manifest(manifest: DatasetManifest, directory: str | Path) -> tuple[Path, Path]:
    """Write ``train.manifest`` and ``test.manifest`` under ``directory``.

    Each file starts with '# protocol:' and '# split:' header lines followed
    by one sample id per line.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for split, split_ids in (("train", manifest.train_ids), ("test", manifest.test_ids)):
        path = directory / f"{split}.manifest"
        lines = [f"# protocol: {manifest.protocol}", f"# split: {split}", *split_ids]
        path.write_text("\n".join(lines) + "\n")
        paths.append(path)
    return paths[0], paths[1]


def read_manifest_ids(path: str | Path) -> list[str]:
    """Read the sample ids from a manifest file, skipping '#' headers."""
    ids = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            ids.append(line)
    return ids
