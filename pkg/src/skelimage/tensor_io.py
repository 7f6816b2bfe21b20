"""Bit-exact tensor container and lossy PNG preview export.

TensorFile byte layout, little-endian throughout:

    offset  size         field
    0       8            magic, b"SKLTENSR"
    8       2            format version (uint16), currently 1
    10      4            rows C (uint32)
    14      4            width W (uint32)
    18      4            channels (uint32)
    22      4            dtype tag, b"f32l" = IEEE-754 binary32 little-endian
    26      4            layout byte length L (uint32)
    30      L            channel layout: ';'-joined descriptor labels, UTF-8
    30+L    4*C*W*ch     payload, row-major (C outermost, channels innermost)

Writing the same image twice produces identical byte streams; write/read is
an exact round-trip.  PNG export quantizes to 8 bits (round-half-up) and is
one-way: previews are never read back for computation.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import Sequence

import numpy as np
from PIL import Image

from .motion_encoder import ChannelDesc, EncodedImage

MAGIC = b"SKLTENSR"
VERSION = 1
DTYPE_TAG = b"f32l"

_HEADER = struct.Struct("<8sHIII4sI")


class TensorFormatError(ValueError):
    """Byte stream does not follow the TensorFile layout."""


def tensor_bytes(img: EncodedImage) -> bytes:
    """Serialize an image to the TensorFile byte layout."""
    rows, width, channels = img.values.shape
    layout = img.layout_string().encode("utf-8")
    header = _HEADER.pack(MAGIC, VERSION, rows, width, channels, DTYPE_TAG, len(layout))
    payload = np.ascontiguousarray(img.values, dtype="<f4").tobytes()
    return header + layout + payload


def write_tensor(img: EncodedImage, destination: str | Path) -> int:
    """Write an image as a TensorFile; returns the byte count."""
    data = tensor_bytes(img)
    Path(destination).write_bytes(data)
    return len(data)


def _check_magic(data: bytes) -> None:
    if len(data) < len(MAGIC):
        if MAGIC.startswith(data):
            raise TensorFormatError("truncated tensor header")
        raise TensorFormatError("not a tensor file (bad magic)")
    if data[: len(MAGIC)] != MAGIC:
        raise TensorFormatError("not a tensor file (bad magic)")


def parse_tensor(data: bytes) -> EncodedImage:
    """Reconstruct an image from TensorFile bytes."""
    _check_magic(data)
    if len(data) < _HEADER.size:
        raise TensorFormatError("truncated tensor header")
    _, version, rows, width, channels, dtype_tag, layout_len = _HEADER.unpack_from(data, 0)
    if version < 1 or version > VERSION:
        raise TensorFormatError(f"unsupported version {version}")
    if dtype_tag != DTYPE_TAG:
        raise TensorFormatError(f"unsupported dtype tag {dtype_tag!r}")
    offset = _HEADER.size
    if len(data) < offset + layout_len:
        raise TensorFormatError("truncated channel layout")
    try:
        layout_str = data[offset : offset + layout_len].decode("utf-8")
    except UnicodeDecodeError as exc:
        raise TensorFormatError(f"bad channel layout encoding: {exc}") from None
    offset += layout_len
    expected = 4 * rows * width * channels
    if len(data) < offset + expected:
        raise TensorFormatError("unexpected end of payload")
    if len(data) > offset + expected:
        raise TensorFormatError("trailing data after payload")
    values = np.frombuffer(data, dtype="<f4", count=rows * width * channels, offset=offset)
    try:
        layout = tuple(ChannelDesc.from_label(tok) for tok in layout_str.split(";"))
        return EncodedImage(values.reshape(rows, width, channels).copy(), layout)
    except ValueError as exc:
        raise TensorFormatError(str(exc)) from None


def read_tensor(source: str | Path) -> EncodedImage:
    """Read a TensorFile from disk."""
    return parse_tensor(Path(source).read_bytes())


def read_header(source: str | Path) -> tuple[int, tuple[int, int, int], str, str]:
    """Read only the header: (version, (C, W, ch), dtype tag, layout string)."""
    with open(source, "rb") as fh:
        head = fh.read(_HEADER.size)
        _check_magic(head)
        if len(head) < _HEADER.size:
            raise TensorFormatError("truncated tensor header")
        _, version, rows, width, channels, dtype_tag, layout_len = _HEADER.unpack(head)
        if version < 1 or version > VERSION:
            raise TensorFormatError(f"unsupported version {version}")
        if dtype_tag != DTYPE_TAG:
            raise TensorFormatError(f"unsupported dtype tag {dtype_tag!r}")
        layout_bytes = fh.read(layout_len)
        if len(layout_bytes) < layout_len:
            raise TensorFormatError("truncated channel layout")
    try:
        layout_str = layout_bytes.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise TensorFormatError(f"bad channel layout encoding: {exc}") from None
    return version, (rows, width, channels), dtype_tag.decode("ascii"), layout_str


def export_png(
    img: EncodedImage, channels: Sequence[int], destination: str | Path
) -> None:
    """Quantize selected channels to 8 bits and save a PNG preview.

    One channel gives a grayscale image, three give RGB; the PNG is W pixels
    wide and C pixels tall.  Pixels are round(v * 255) with round-half-up.
    """
    selection = tuple(int(c) for c in channels)
    if len(selection) not in (1, 3):
        raise ValueError("select 1 (grayscale) or 3 (RGB) channels")
    available = img.values.shape[2]
    for c in selection:
        if not 0 <= c < available:
            raise ValueError(f"invalid channel index {c}: image has {available} channels")
    arr = img.values[:, :, selection].astype(np.float64)
    pixels = np.clip(np.floor(arr * 255.0 + 0.5), 0.0, 255.0).astype(np.uint8)
    if len(selection) == 1:
        picture = Image.fromarray(pixels[:, :, 0], mode="L")
    else:
        picture = Image.fromarray(pixels, mode="RGB")
    picture.save(destination, format="PNG")
