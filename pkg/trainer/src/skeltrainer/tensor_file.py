"""Reader for the encoder toolkit's TensorFile container.

Byte layout (little-endian): 8-byte magic ``SKLTENSR``, uint16 version,
three uint32 dims (rows, width, channels), 4-byte dtype tag ``f32l``,
uint32 layout length, the ';'-joined channel layout string in UTF-8, then
rows*width*channels float32 values in row-major order (rows outermost,
channels innermost).
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"SKLTENSR"
SUPPORTED_VERSION = 1
DTYPE_TAG = b"f32l"

_HEADER = struct.Struct("<8sHIII4sI")


class TensorFileError(ValueError):
    """File does not follow the TensorFile layout."""


def read_tensor_header(path: str | Path) -> tuple[tuple[int, int, int], list[str]]:
    """Read dims and channel labels without loading the payload."""
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) < _HEADER.size or head[:8] != MAGIC:
            raise TensorFileError(f"{path}: not a tensor file")
        _, version, rows, width, channels, dtype_tag, layout_len = _HEADER.unpack(head)
        if version != SUPPORTED_VERSION:
            raise TensorFileError(f"{path}: unsupported version {version}")
        if dtype_tag != DTYPE_TAG:
            raise TensorFileError(f"{path}: unsupported dtype tag {dtype_tag!r}")
        layout = fh.read(layout_len).decode("utf-8")
    return (rows, width, channels), layout.split(";")


def read_tensor_file(path: str | Path) -> tuple[np.ndarray, list[str]]:
    """Load a tensor file: returns ((rows, width, channels) float32, labels)."""
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size or data[:8] != MAGIC:
        raise TensorFileError(f"{path}: not a tensor file")
    _, version, rows, width, channels, dtype_tag, layout_len = _HEADER.unpack_from(data, 0)
    if version != SUPPORTED_VERSION:
        raise TensorFileError(f"{path}: unsupported version {version}")
    if dtype_tag != DTYPE_TAG:
        raise TensorFileError(f"{path}: unsupported dtype tag {dtype_tag!r}")
    offset = _HEADER.size
    layout = data[offset : offset + layout_len].decode("utf-8").split(";")
    offset += layout_len
    count = rows * width * channels
    if len(data) - offset < 4 * count:
        raise TensorFileError(f"{path}: unexpected end of payload")
    values = np.frombuffer(data, dtype="<f4", count=count, offset=offset)
    return values.reshape(rows, width, channels).copy(), layout
