"""Comparison encoders: coordinate images (natural and chain-ordered rows)
and the consecutive-frame motion image."""

from __future__ import annotations

import numpy as np

from .chain_builder import ChainOrder, build_chain_matrix
from .motion_encoder import (
    NORM_EPSILON,
    ChannelDesc,
    EncodedImage,
    EncoderConfig,
    resize_temporal,
)
from .skeleton_data import BodyTrack

COORDINATE = "coord"
TSSI = "tssi"
NAIVE_MOTION = "naive-motion"

AXES = ("x", "y", "z")


def _minmax_per_axis(values: np.ndarray) -> np.ndarray:
    # (rows, T, 3) -> [0, 1], min-max per axis over the whole sample
    low = values.min(axis=(0, 1), keepdims=True)
    span = values.max(axis=(0, 1), keepdims=True) - low
    return (values - low) / np.maximum(span, NORM_EPSILON)


def encode_coordinate_image(track: BodyTrack, cfg: EncoderConfig) -> EncodedImage:
    """Raw coordinates in natural joint order: (25, W, 3), min-max per axis."""
    raw = np.transpose(track.frames, (1, 0, 2))  # (J, T, 3)
    values = resize_temporal(_minmax_per_axis(raw), cfg.target_width)
    layout = tuple(ChannelDesc(0, COORDINATE, plane=axis) for axis in AXES)
    return EncodedImage(values.astype(np.float32), layout)


def encode_tssi(track: BodyTrack, chain: ChainOrder, cfg: EncoderConfig) -> EncodedImage:
    """Coordinate image with rows gathered along the traversal chain: (C, W, 3)."""
    gathered = build_chain_matrix(track, chain)
    values = resize_temporal(_minmax_per_axis(gathered), cfg.target_width)
    layout = tuple(ChannelDesc(0, TSSI, plane=axis) for axis in AXES)
    return EncodedImage(values.astype(np.float32), layout)


def encode_naive_motion(track: BodyTrack, cfg: EncoderConfig) -> EncodedImage:
    """Consecutive-frame differences in natural joint order: (25, W, 3).

    Differences are normalized symmetrically per axis so zero displacement
    maps to 0.5 and negative displacements stay representable.
    """
    if track.frame_count < 2:
        raise ValueError("naive motion image needs at least 2 frames")
    diffs = np.transpose(np.diff(track.frames, axis=0), (1, 0, 2))  # (J, T - 1, 3)
    scale = np.maximum(np.abs(diffs).max(axis=(0, 1), keepdims=True), NORM_EPSILON)
    values = resize_temporal(0.5 + diffs / (2.0 * scale), cfg.target_width)
    layout = tuple(ChannelDesc(0, NAIVE_MOTION, scale=1, plane=axis) for axis in AXES)
    return EncodedImage(values.astype(np.float32), layout)
