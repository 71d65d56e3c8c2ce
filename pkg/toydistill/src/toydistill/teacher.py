"""Toy convolutional teacher: an input stem, N searchable conv layers
and a classifier head. Stems are not searchable and never appear in
emitted instances."""

from __future__ import annotations

import math
from dataclasses import dataclass

import torch
from torch import nn

from .data import DataBundle, N_CLASSES


@dataclass(frozen=True)
class LayerShape:
    """Input/output tensor dimensions of one searchable layer. Every
    candidate op for the layer must map in_shape to out_shape."""

    in_ch: int
    out_ch: int
    stride: int
    in_hw: int
    out_hw: int

    @property
    def in_shape(self) -> tuple[int, int, int]:
        return (self.in_ch, self.in_hw, self.in_hw)

    @property
    def out_shape(self) -> tuple[int, int, int]:
        return (self.out_ch, self.out_hw, self.out_hw)


@dataclass(frozen=True)
class ToyTeacherSpec:
    """Widths/strides of the searchable layers; N must be in [6, 12]."""

    image_size: int = 32
    stem_width: int = 16
    widths: tuple[int, ...] = (16, 32, 32, 32, 64, 64, 64, 64)
    strides: tuple[int, ...] = (1, 2, 1, 1, 2, 1, 1, 1)
    n_classes: int = N_CLASSES

    def __post_init__(self) -> None:
        if not 6 <= len(self.widths) <= 12:
            raise ValueError("teacher needs between 6 and 12 searchable layers")
        if len(self.strides) != len(self.widths):
            raise ValueError("widths and strides must align")

    @property
    def n_layers(self) -> int:
        return len(self.widths)

    def layer_shapes(self) -> tuple[LayerShape, ...]:
        shapes = []
        in_ch, hw = self.stem_width, self.image_size
        for out_ch, stride in zip(self.widths, self.strides):
            out_hw = math.ceil(hw / stride)
            shapes.append(LayerShape(in_ch, out_ch, stride, hw, out_hw))
            in_ch, hw = out_ch, out_hw
        return tuple(shapes)


def conv_bn_relu(in_ch: int, out_ch: int, stride: int, kernel: int = 3) -> nn.Sequential:
    return nn.Sequential(
        nn.Conv2d(in_ch, out_ch, kernel, stride=stride, padding=kernel // 2, bias=False),
        nn.BatchNorm2d(out_ch),
        nn.ReLU(inplace=True),
    )


class ResidualUnit(nn.Module):
    """relu(x + bn(conv(x))): the teacher op at shape-preserving layers,
    so skipping a layer removes a refinement rather than the signal."""

    def __init__(self, ch: int):
        super().__init__()
        self.body = nn.Sequential(
            nn.Conv2d(ch, ch, 3, padding=1, bias=False),
            nn.BatchNorm2d(ch),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return torch.relu(x + self.body(x))


def teacher_op(shape: "LayerShape") -> nn.Module:
    if shape.stride == 1 and shape.in_ch == shape.out_ch:
        return ResidualUnit(shape.in_ch)
    return conv_bn_relu(shape.in_ch, shape.out_ch, shape.stride)


class TeacherNet(nn.Module):
    def __init__(self, spec: ToyTeacherSpec):
        super().__init__()
        self.spec = spec
        self.stem = conv_bn_relu(3, spec.stem_width, stride=1)
        self.layers = nn.ModuleList(teacher_op(s) for s in spec.layer_shapes())
        self.head = nn.Sequential(
            nn.AdaptiveAvgPool2d(1),
            nn.Flatten(),
            nn.Linear(spec.widths[-1], spec.n_classes),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x = self.stem(x)
        for layer in self.layers:
            x = layer(x)
        return self.head(x)

    def forward_collect(self, x: torch.Tensor) -> tuple[torch.Tensor, list[torch.Tensor]]:
        """Forward pass keeping every searchable layer's input, so all
        candidate ops of all layers can train off one teacher pass."""
        acts = []
        x = self.stem(x)
        for layer in self.layers:
            acts.append(x)
            x = layer(x)
        acts.append(x)  # final feature map, input to the head
        return self.head(x), acts


def batches(n: int, batch_size: int, generator: torch.Generator):
    order = torch.randperm(n, generator=generator)
    for start in range(0, n, batch_size):
        yield order[start: start + batch_size]


def train_teacher(
    model: TeacherNet,
    data: DataBundle,
    epochs: int = 4,
    lr: float = 0.05,
    batch_size: int = 64,
    seed: int = 0,
) -> float:
    """Plain SGD classification training; returns final test accuracy."""
    gen = torch.Generator().manual_seed(seed)
    opt = torch.optim.SGD(model.parameters(), lr=lr, momentum=0.9)
    loss_fn = nn.CrossEntropyLoss()
    model.train()
    for _ in range(epochs):
        for idx in batches(len(data.train_x), batch_size, gen):
            opt.zero_grad()
            loss = loss_fn(model(data.train_x[idx]), data.train_y[idx])
            loss.backward()
            opt.step()
    model.eval()
    return evaluate(model, data.test_x, data.test_y)[1]


@torch.no_grad()
def evaluate(model: nn.Module, x: torch.Tensor, y: torch.Tensor, batch_size: int = 256):
    """(mean cross-entropy, accuracy) in eval mode."""
    model.eval()
    loss_fn = nn.CrossEntropyLoss(reduction="sum")
    total_loss = 0.0
    correct = 0
    for start in range(0, len(x), batch_size):
        logits = model(x[start: start + batch_size])
        yy = y[start: start + batch_size]
        total_loss += float(loss_fn(logits, yy))
        correct += int((logits.argmax(dim=1) == yy).sum())
    return total_loss / len(x), correct / len(x)
