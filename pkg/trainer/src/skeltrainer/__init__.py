"""Smoke-scale CNN classification harness for skeleton-image tensor files.

Consumes the encoder toolkit purely through its file formats: TensorFile
inputs, manifest/label text files, and score-file outputs.
"""

from .tensor_file import TensorFileError, read_tensor_file, read_tensor_header
from .textio import read_labels, read_manifest_ids, write_scores
from .model import ModelSpec, TinyConvNet, conv_output_trace
from .training import evaluate, train

__version__ = "0.1.0"
