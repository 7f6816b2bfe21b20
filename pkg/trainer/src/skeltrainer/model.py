"""The tiny convolutional classifier.

Three 3x3 convolution blocks (strides 1, 1, 2; each followed by ReLU and
2x2 max pooling) and two fully-connected layers with dropout in between.
Pooling placement, the conv widths (32, 64, 128), and the first FC width
(256) are repo-local constants.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
from torch import nn


@dataclass(frozen=True)
class ModelSpec:
    """Architecture and training hyperparameters.

    The training defaults (batch 1000, 200 epochs, learning rate 0.001,
    dropout 0.5) are full-dataset settings; desk-scale runs override batch
    size and epochs via CLI flags.
    """

    in_channels: int
    num_classes: int
    conv_channels: tuple[int, int, int] = (32, 64, 128)
    kernel_size: int = 3
    conv_strides: tuple[int, int, int] = (1, 1, 2)
    pool_size: int = 2
    fc_width: int = 256
    dropout: float = 0.5
    learning_rate: float = 1e-3
    batch_size: int = 1000
    epochs: int = 200

    def __post_init__(self) -> None:
        if self.in_channels < 1 or self.num_classes < 2:
            raise ValueError("need at least 1 input channel and 2 classes")
        if len(self.conv_channels) != 3 or len(self.conv_strides) != 3:
            raise ValueError("expected 3 convolution blocks")


def conv_output_trace(
    spec: ModelSpec, height: int, width: int
) -> list[tuple[int, int, int]]:
    """Shapes after each conv and each pool, for a (in_channels, H, W) input."""
    pad = spec.kernel_size // 2
    shapes = []
    h, w = height, width
    for channels, stride in zip(spec.conv_channels, spec.conv_strides):
        h = (h + 2 * pad - spec.kernel_size) // stride + 1
        w = (w + 2 * pad - spec.kernel_size) // stride + 1
        shapes.append((channels, h, w))
        h //= spec.pool_size
        w //= spec.pool_size
        shapes.append((channels, h, w))
    return shapes


class TinyConvNet(nn.Module):
    def __init__(self, spec: ModelSpec, height: int, width: int):
        super().__init__()
        self.spec = spec
        self.input_size = (height, width)
        pad = spec.kernel_size // 2
        blocks = []
        channels = spec.in_channels
        for out_channels, stride in zip(spec.conv_channels, spec.conv_strides):
            blocks += [
                nn.Conv2d(channels, out_channels, spec.kernel_size, stride=stride, padding=pad),
                nn.ReLU(),
                nn.MaxPool2d(spec.pool_size),
            ]
            channels = out_channels
        self.features = nn.Sequential(*blocks)
        final_c, final_h, final_w = conv_output_trace(spec, height, width)[-1]
        if final_h < 1 or final_w < 1:
            raise ValueError(f"input {height}x{width} is too small for the network")
        self.classifier = nn.Sequential(
            nn.Flatten(),
            nn.Linear(final_c * final_h * final_w, spec.fc_width),
            nn.ReLU(),
            nn.Dropout(spec.dropout),
            nn.Linear(spec.fc_width, spec.num_classes),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.classifier(self.features(x))

    def parameter_count(self) -> int:
        return sum(p.numel() for p in self.parameters())
