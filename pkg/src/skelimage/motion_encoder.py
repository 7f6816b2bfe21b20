"""Motion-image encoding: differencing, magnitude, three-plane orientation,
threshold filtering, multi-scale stacking, and person stacking.

Per temporal distance d the pipeline is:

    chain matrix S (C, T, 3)
      -> displacement D[c, t] = S[c, t + d] - S[c, t]        (C, T - d, 3)
      -> magnitude  M[c, t] = |D[c, t]|                      (C, T - d, 1)
      -> orientation theta: four-quadrant angles in the
         xy, yz, zx planes                                   (C, T - d, 3)
      -> theta zeroed wherever M < threshold * d
      -> each map normalized into [0, 1] and resized to a fixed width
      -> maps for all distances stacked along the channel axis

Magnitude maps are normalized by their own per-scale maximum (larger d
mechanically inflates displacements, so each scale is normalized
independently); orientation maps use the fixed affine map from [-pi, pi].
All operations are pure, elementwise-deterministic numpy, so repeated runs
produce bit-identical outputs.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .chain_builder import ChainOrder, build_chain_matrix
from .skeleton_data import BodyTrack

MAGNITUDE = "magnitude"
ORIENTATION = "orientation"
MAGNITUDE_ORIENTATION = "magnitude+orientation"
REPRESENTATIONS = (MAGNITUDE, ORIENTATION, MAGNITUDE_ORIENTATION)

DEFAULT_DISTANCES = {
    MAGNITUDE: (5, 10, 15),
    ORIENTATION: (1, 10, 20),
    MAGNITUDE_ORIENTATION: (5, 10, 15),
}
DEFAULT_MAGNITUDE_THRESHOLD = 0.004
DEFAULT_TARGET_WIDTH = 100
DEFAULT_MAX_PERSONS = 2
NORM_EPSILON = 1e-8

ORIENTATION_PLANES = ("xy", "yz", "zx")


@dataclass(frozen=True)
class EncoderConfig:
    """Knobs of the motion-image encoder.

    ``distances`` defaults depend on the representation: (5, 10, 15) for
    magnitude and (1, 10, 20) for orientation.  A single distance gives the
    plain single-scale representation; several give the multi-scale stack.
    """

    representation: str = MAGNITUDE
    distances: tuple[int, ...] | None = None
    magnitude_threshold: float = DEFAULT_MAGNITUDE_THRESHOLD
    target_width: int = DEFAULT_TARGET_WIDTH
    max_persons: int = DEFAULT_MAX_PERSONS
    normalization: str = "per-scale"

    def __post_init__(self) -> None:
        if self.representation not in REPRESENTATIONS:
            raise ValueError(f"unknown representation {self.representation!r}")
        distances = self.distances
        if distances is None:
            distances = DEFAULT_DISTANCES[self.representation]
        distances = tuple(int(d) for d in distances)
        if not distances:
            raise ValueError("need at least one temporal distance")
        if any(d < 1 for d in distances):
            raise ValueError("temporal distances must be positive")
        if any(b <= a for a, b in zip(distances, distances[1:])):
            raise ValueError("temporal distances must be strictly increasing")
        object.__setattr__(self, "distances", distances)
        if not self.magnitude_threshold >= 0:
            raise ValueError("magnitude threshold must be non-negative")
        if self.target_width < 2:
            raise ValueError("target width must be >= 2")
        if self.max_persons < 1:
            raise ValueError("max persons must be >= 1")
        if self.normalization != "per-scale":
            raise ValueError(f"unknown normalization strategy {self.normalization!r}")


@dataclass(frozen=True)
class ChannelDesc:
    """What one image channel holds: person, representation, scale, plane."""

    person: int
    representation: str
    scale: int | None = None
    plane: str | None = None

    def __post_init__(self) -> None:
        if self.person < 0:
            raise ValueError("person index must be >= 0")
        if not self.representation or ":" in self.representation or ";" in self.representation:
            raise ValueError(f"bad representation token {self.representation!r}")

    def label(self) -> str:
        parts = [f"p{self.person}", self.representation]
        if self.scale is not None:
            parts.append(f"d{self.scale}")
        if self.plane is not None:
            parts.append(self.plane)
        return ":".join(parts)

    @classmethod
    def from_label(cls, label: str) -> "ChannelDesc":
        parts = label.split(":")
        if len(parts) < 2 or not parts[0].startswith("p") or not parts[0][1:].isdigit():
            raise ValueError(f"bad channel descriptor {label!r}")
        scale: int | None = None
        plane: str | None = None
        for token in parts[2:]:
            if len(token) > 1 and token[0] == "d" and token[1:].isdigit():
                scale = int(token[1:])
            else:
                plane = token
        return cls(int(parts[0][1:]), parts[1], scale, plane)


@dataclass(frozen=True)
class EncodedImage:
    """Final image tensor: (C, W, channels) float32, values in [0, 1]."""

    values: np.ndarray
    channel_layout: tuple[ChannelDesc, ...]

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float32)
        layout = tuple(self.channel_layout)
        if values.ndim != 3:
            raise ValueError(f"image must be (C, W, channels), got shape {values.shape}")
        if not layout or values.shape[2] != len(layout):
            raise ValueError(
                f"channel layout has {len(layout)} descriptors for "
                f"{values.shape[2]} channels"
            )
        if not np.isfinite(values).all():
            raise ValueError("image values must be finite")
        if float(values.min()) < 0.0 or float(values.max()) > 1.0:
            raise ValueError("image values must lie in [0, 1]")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "channel_layout", layout)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def channels(self) -> int:
        return self.values.shape[2]

    def layout_string(self) -> str:
        return ";".join(desc.label() for desc in self.channel_layout)


@dataclass(frozen=True)
class MotionTensor:
    """Joint displacement over ``distance`` frames: (C, T - d, 3)."""

    values: np.ndarray
    distance: int

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 3 or values.shape[2] != 3 or values.shape[1] < 1:
            raise ValueError(f"motion tensor must be (C, T - d, 3), got {values.shape}")
        if self.distance < 1:
            raise ValueError("distance must be >= 1")
        if not np.isfinite(values).all():
            raise ValueError("motion tensor must be finite")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "distance", int(self.distance))


@dataclass(frozen=True)
class MagnitudeMap:
    """Displacement magnitudes: (C, T - d, 1), non-negative."""

    values: np.ndarray
    distance: int

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 3 or values.shape[2] != 1 or values.shape[1] < 1:
            raise ValueError(f"magnitude map must be (C, T - d, 1), got {values.shape}")
        if not np.isfinite(values).all() or float(values.min()) < 0.0:
            raise ValueError("magnitudes must be finite and non-negative")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "distance", int(self.distance))


@dataclass(frozen=True)
class OrientationMap:
    """Displacement angles in the (xy, yz, zx) planes: (C, T - d, 3) radians."""

    values: np.ndarray
    distance: int

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 3 or values.shape[2] != 3 or values.shape[1] < 1:
            raise ValueError(f"orientation map must be (C, T - d, 3), got {values.shape}")
        if not np.isfinite(values).all():
            raise ValueError("orientation angles must be finite")
        if float(np.abs(values).max()) > np.pi:
            raise ValueError("orientation angles must lie in [-pi, pi]")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "distance", int(self.distance))


def motion_difference(chain_matrix: np.ndarray, distance: int) -> MotionTensor:
    """Displacement of every chain joint over ``distance`` frames."""
    source = np.asarray(chain_matrix, dtype=np.float64)
    if source.ndim != 3 or source.shape[2] != 3:
        raise ValueError(f"chain matrix must be (C, T, 3), got shape {source.shape}")
    d = int(distance)
    if d < 1:
        raise ValueError("distance must be >= 1")
    total = source.shape[1]
    if d >= total:
        raise ValueError(
            f"sequence too short for distance {d}: need more than {d} frames, got {total}"
        )
    return MotionTensor(source[:, d:, :] - source[:, : total - d, :], d)


def magnitude(motion: MotionTensor) -> MagnitudeMap:
    """Euclidean length of every displacement vector."""
    v = motion.values
    return MagnitudeMap(np.sqrt(np.sum(v * v, axis=2, keepdims=True)), motion.distance)


def orientation(motion: MotionTensor) -> OrientationMap:
    """Four-quadrant displacement angles in the xy, yz, zx planes.

    A zero displacement yields angle 0 in every plane by the atan2(0, 0)
    convention, so no division by zero can occur.
    """
    x = motion.values[:, :, 0]
    y = motion.values[:, :, 1]
    z = motion.values[:, :, 2]
    theta = np.stack((np.arctan2(y, x), np.arctan2(z, y), np.arctan2(x, z)), axis=2)
    return OrientationMap(theta, motion.distance)


def _check_aligned(theta: OrientationMap, mag: MagnitudeMap) -> None:
    if theta.values.shape[:2] != mag.values.shape[:2]:
        raise ValueError(
            f"orientation/magnitude dimension mismatch: "
            f"{theta.values.shape[:2]} vs {mag.values.shape[:2]}"
        )
    if theta.distance != mag.distance:
        raise ValueError(
            f"orientation/magnitude distance mismatch: "
            f"{theta.distance} vs {mag.distance}"
        )


def filter_orientation(
    theta: OrientationMap, mag: MagnitudeMap, threshold: float
) -> OrientationMap:
    """Zero all angle channels wherever the magnitude is strictly below
    ``threshold``."""
    _check_aligned(theta, mag)
    if not threshold >= 0:
        raise ValueError("threshold must be non-negative")
    return OrientationMap(
        np.where(mag.values < threshold, 0.0, theta.values), theta.distance
    )


def filter_orientation_tsa(
    theta: OrientationMap, mag: MagnitudeMap, threshold: float, distance: int
) -> OrientationMap:
    """Distance-weighted filtering: zero where magnitude < threshold * d.

    With ``distance`` 1 this is exactly ``filter_orientation``.
    """
    _check_aligned(theta, mag)
    if not threshold >= 0:
        raise ValueError("threshold must be non-negative")
    if int(distance) != theta.distance:
        raise ValueError(
            f"distance {int(distance)} does not match the maps' distance {theta.distance}"
        )
    return OrientationMap(
        np.where(mag.values < threshold * int(distance), 0.0, theta.values),
        theta.distance,
    )


def normalize(values: np.ndarray, strategy: str) -> np.ndarray:
    """Map an array into [0, 1].

    ``magnitude``: divide by the array's global maximum (epsilon-guarded, so
    an all-zero map stays zero); assumes non-negative input.
    ``orientation``: fixed affine map from [-pi, pi], so the angle scale is
    comparable across samples and 0 lands exactly on 0.5.
    """
    v = np.asarray(values, dtype=np.float64)
    if not np.isfinite(v).all():
        raise ValueError("cannot normalize non-finite values")
    if strategy == MAGNITUDE:
        return v / max(float(v.max()), NORM_EPSILON)
    if strategy == ORIENTATION:
        return (v + np.pi) / (2.0 * np.pi)
    raise ValueError(f"unknown normalization strategy {strategy!r}")


def resize_temporal(img: np.ndarray, width: int) -> np.ndarray:
    """Linearly resample (C, T', ch) along time to (C, width, ch).

    Endpoints are aligned: the first and last input columns are preserved
    exactly, and T' == width is an exact identity.  A single input column is
    broadcast.
    """
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 3:
        raise ValueError(f"expected (C, T', ch) array, got shape {arr.shape}")
    w = int(width)
    if w < 1:
        raise ValueError("target width must be >= 1")
    t = arr.shape[1]
    if t < 1:
        raise ValueError("input must have at least one column")
    if t == 1:
        return np.repeat(arr, w, axis=1)
    positions = np.linspace(0.0, float(t - 1), w)
    lo = np.minimum(np.floor(positions).astype(np.intp), t - 2)
    frac = positions - lo
    left = arr[:, lo, :]
    right = arr[:, lo + 1, :]
    return left * (1.0 - frac)[None, :, None] + right * frac[None, :, None]


def encode_skelemotion(
    track: BodyTrack, chain: ChainOrder, cfg: EncoderConfig
) -> EncodedImage:
    """Encode one body track into its motion image.

    For each configured distance (ascending) the magnitude map contributes
    one channel and the filtered orientation map three (xy, yz, zx).  With
    both representations requested, all magnitude channels precede all
    orientation channels.
    """
    needed = max(cfg.distances) + 1
    if track.frame_count < needed:
        raise ValueError(
            f"track too short for distances {cfg.distances}: need at least "
            f"{needed} frames, got {track.frame_count}"
        )
    source = build_chain_matrix(track, chain)
    want_mag = cfg.representation in (MAGNITUDE, MAGNITUDE_ORIENTATION)
    want_ori = cfg.representation in (ORIENTATION, MAGNITUDE_ORIENTATION)

    mag_channels: list[np.ndarray] = []
    mag_layout: list[ChannelDesc] = []
    ori_channels: list[np.ndarray] = []
    ori_layout: list[ChannelDesc] = []
    for d in cfg.distances:
        motion = motion_difference(source, d)
        mag = magnitude(motion)
        if want_mag:
            mag_channels.append(
                resize_temporal(normalize(mag.values, MAGNITUDE), cfg.target_width)
            )
            mag_layout.append(ChannelDesc(0, MAGNITUDE, scale=d))
        if want_ori:
            theta = filter_orientation_tsa(
                orientation(motion), mag, cfg.magnitude_threshold, d
            )
            resized = resize_temporal(
                normalize(theta.values, ORIENTATION), cfg.target_width
            )
            for i, plane in enumerate(ORIENTATION_PLANES):
                ori_channels.append(resized[:, :, i : i + 1])
                ori_layout.append(ChannelDesc(0, ORIENTATION, scale=d, plane=plane))

    values = np.concatenate(mag_channels + ori_channels, axis=2)
    return EncodedImage(values.astype(np.float32), tuple(mag_layout + ori_layout))


def stack_persons(images: Sequence[EncodedImage], max_persons: int) -> EncodedImage:
    """Concatenate per-person images along channels, zero-padding to
    ``max_persons`` blocks.

    All images must share height, width, and per-person channel count; the
    channel layout is re-labeled with each image's person index.
    """
    images = list(images)
    if not images:
        raise ValueError("no images to stack")
    if max_persons < 1:
        raise ValueError("max persons must be >= 1")
    if len(images) > max_persons:
        raise ValueError(f"got {len(images)} person images for at most {max_persons}")
    base = images[0].values.shape
    for img in images[1:]:
        if img.values.shape != base:
            raise ValueError(f"mismatched image shapes: {base} vs {img.values.shape}")
    blocks = [img.values for img in images]
    layout: list[ChannelDesc] = []
    for person, img in enumerate(images):
        layout.extend(replace(desc, person=person) for desc in img.channel_layout)
    for person in range(len(images), max_persons):
        blocks.append(np.zeros(base, dtype=np.float32))
        layout.extend(ChannelDesc(person, "pad") for _ in range(base[2]))
    return EncodedImage(np.concatenate(blocks, axis=2), tuple(layout))


def early_fuse(images: Sequence[EncodedImage]) -> EncodedImage:
    """Concatenate whole representations along channels, layouts preserved."""
    images = list(images)
    if not images:
        raise ValueError("no images to fuse")
    height, width = images[0].values.shape[:2]
    for img in images[1:]:
        if img.values.shape[:2] != (height, width):
            raise ValueError(
                f"mismatched image shapes: {(height, width)} vs {img.values.shape[:2]}"
            )
    values = np.concatenate([img.values for img in images], axis=2)
    layout = tuple(desc for img in images for desc in img.channel_layout)
    return EncodedImage(values, layout)
