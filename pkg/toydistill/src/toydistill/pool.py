"""Per-layer candidate operation pools.

Families: the teacher's own op (shared weights, never retrained), a
parameter-free identity where shapes permit, stacked dense-conv blocks
(conv-bn-relu-conv-bn) over kernel sizes 1 and 3 and width multipliers
0.5/1/2, a bottleneck block, and an inverted-residual block with
expansion 3. Every op maps the layer's input shape to the teacher op's
output shape.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
from torch import nn

from .teacher import LayerShape, TeacherNet


@dataclass(frozen=True)
class PoolOp:
    op_id: str
    module: nn.Module
    tags: tuple[str, ...]


@dataclass(frozen=True)
class CandidatePoolSpec:
    stack_kernels: tuple[int, ...] = (1, 3)
    stack_widths: tuple[float, ...] = (0.5, 1.0, 2.0)
    bottleneck_width: float = 0.5
    ir_expansion: int = 3

    def op_count(self, identity_legal: bool) -> int:
        # teacher + identity? + k1 stack (w 0.5) + k3 stacks + bottleneck + ir
        return 1 + int(identity_legal) + 1 + len(self.stack_widths) + 1 + 1


def _hidden(ch: int, mult: float) -> int:
    return max(4, round(ch * mult))


class MaybeResidual(nn.Module):
    """Wraps a block with a skip connection when the layer preserves
    shape, mirroring the residual structure of the teacher ops."""

    def __init__(self, body: nn.Module, shape: LayerShape):
        super().__init__()
        self.body = body
        self.use_skip = shape.stride == 1 and shape.in_ch == shape.out_ch

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        out = self.body(x)
        return out + x if self.use_skip else out


def make_cb_stack(shape: LayerShape, kernel: int, width: float) -> nn.Module:
    hidden = _hidden(shape.out_ch, width)
    body = nn.Sequential(
        nn.Conv2d(shape.in_ch, hidden, kernel, stride=shape.stride,
                  padding=kernel // 2, bias=False),
        nn.BatchNorm2d(hidden),
        nn.ReLU(inplace=True),
        nn.Conv2d(hidden, shape.out_ch, kernel, padding=kernel // 2, bias=False),
        nn.BatchNorm2d(shape.out_ch),
    )
    return MaybeResidual(body, shape)


def make_cb_bottleneck(shape: LayerShape, width: float) -> nn.Module:
    hidden = _hidden(shape.out_ch, width)
    body = nn.Sequential(
        nn.Conv2d(shape.in_ch, hidden, 1, bias=False),
        nn.BatchNorm2d(hidden),
        nn.ReLU(inplace=True),
        nn.Conv2d(hidden, hidden, 3, stride=shape.stride, padding=1, bias=False),
        nn.BatchNorm2d(hidden),
        nn.ReLU(inplace=True),
        nn.Conv2d(hidden, shape.out_ch, 1, bias=False),
        nn.BatchNorm2d(shape.out_ch),
    )
    return MaybeResidual(body, shape)


class InvertedResidual(nn.Module):
    def __init__(self, shape: LayerShape, expansion: int):
        super().__init__()
        hidden = shape.in_ch * expansion
        self.use_skip = shape.stride == 1 and shape.in_ch == shape.out_ch
        self.body = nn.Sequential(
            nn.Conv2d(shape.in_ch, hidden, 1, bias=False),
            nn.BatchNorm2d(hidden),
            nn.ReLU(inplace=True),
            nn.Conv2d(hidden, hidden, 3, stride=shape.stride, padding=1,
                      groups=hidden, bias=False),
            nn.BatchNorm2d(hidden),
            nn.ReLU(inplace=True),
            nn.Conv2d(hidden, shape.out_ch, 1, bias=False),
            nn.BatchNorm2d(shape.out_ch),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        out = self.body(x)
        return out + x if self.use_skip else out


def identity_legal(shape: LayerShape) -> bool:
    return shape.stride == 1 and shape.in_ch == shape.out_ch


def build_pool(
    teacher: TeacherNet,
    spec: CandidatePoolSpec | None = None,
    seed: int = 0,
) -> list[list[PoolOp]]:
    """One ordered op list per searchable layer; the teacher op is always
    first and shares the teacher's modules (plugging it back in
    reproduces the teacher network exactly)."""
    spec = spec or CandidatePoolSpec()
    torch.manual_seed(seed)
    pool: list[list[PoolOp]] = []
    for layer_idx, shape in enumerate(teacher.spec.layer_shapes()):
        ops = [PoolOp("teacher", teacher.layers[layer_idx], ("teacher",))]
        if identity_legal(shape):
            ops.append(PoolOp("identity", nn.Identity(), ("identity",)))
        w_tag = lambda w: str(w).replace(".", "")
        ops.append(PoolOp("cb_stack_k1_w05", make_cb_stack(shape, 1, 0.5), ("conv", "stack")))
        for width in spec.stack_widths:
            ops.append(PoolOp(
                f"cb_stack_k3_w{w_tag(width)}",
                make_cb_stack(shape, 3, width),
                ("conv", "stack"),
            ))
        ops.append(PoolOp(
            f"cb_bottle_w{w_tag(spec.bottleneck_width)}",
            make_cb_bottleneck(shape, spec.bottleneck_width),
            ("conv", "bottleneck"),
        ))
        ops.append(PoolOp(
            f"ir_e{spec.ir_expansion}",
            InvertedResidual(shape, spec.ir_expansion),
            ("efn",),
        ))
        assert 4 <= len(ops) <= 16
        pool.append(ops)
    return pool


def teacher_index(ops: list[PoolOp]) -> int:
    return next(i for i, op in enumerate(ops) if op.op_id == "teacher")
