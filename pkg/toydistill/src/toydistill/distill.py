"""Candidate pretraining and per-op loss-delta measurement.

Pretraining regresses each candidate op onto its layer's teacher output
with an MSE loss, feeding every op the frozen teacher's intermediate
activation. All ops of all layers train inside the same teacher forward
pass, so one epoch over the data pretrains the whole pool.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
from torch import nn
from torch.nn import functional as F

from .data import DataBundle
from .pool import PoolOp
from .teacher import TeacherNet, batches, evaluate


@dataclass(frozen=True)
class DistillConfig:
    """One epoch of plain SGD without weight decay; the MSE term is
    scaled by gamma_mse, so lr is sized against that product. Small
    batches buy more optimisation steps out of the single epoch."""

    epochs: int = 1
    lr: float = 160.0
    batch_size: int = 8
    gamma_mse: float = 0.001

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")


@dataclass(frozen=True)
class OpPretrainStats:
    """Layer-wise regression error against the teacher's output, on a
    fixed training-stream batch and a fixed held-out batch, before and
    after pretraining."""

    layer_index: int
    op_id: str
    train_mse_before: float
    train_mse_after: float
    holdout_mse_before: float
    holdout_mse_after: float
    trained: bool


def _trainable(op: PoolOp, teacher_module: nn.Module) -> bool:
    if op.module is teacher_module:
        return False
    return any(p.requires_grad for p in op.module.parameters())


@torch.no_grad()
def _probe_mse(module: nn.Module, x: torch.Tensor, target: torch.Tensor,
               batch_stats: bool) -> float:
    """Layer-wise regression error on a fixed probe batch.

    Ops under training are measured exactly as pretraining sees them:
    train-mode forward (batch statistics), with batch-norm buffers
    snapshotted and restored so measuring has no side effects. Frozen
    ops (the teacher's own, identity) are measured as deployed, in eval
    mode, so the teacher op probes at exactly zero."""
    if not batch_stats:
        module.eval()
        return float(F.mse_loss(module(x), target))
    saved = {
        name: (m.running_mean.clone(), m.running_var.clone(), m.num_batches_tracked.clone())
        for name, m in module.named_modules()
        if isinstance(m, nn.modules.batchnorm._BatchNorm) and m.track_running_stats
    }
    was_training = module.training
    module.train()
    try:
        return float(F.mse_loss(module(x), target))
    finally:
        module.train(was_training)
        for name, m in module.named_modules():
            if name in saved:
                mean, var, count = saved[name]
                m.running_mean.copy_(mean)
                m.running_var.copy_(var)
                m.num_batches_tracked.copy_(count)


def _layer_mse(teacher: TeacherNet, pool: list[list[PoolOp]],
               acts: list[torch.Tensor]) -> dict[tuple[int, str], float]:
    return {
        (i, op.op_id): _probe_mse(
            op.module, acts[i], acts[i + 1],
            batch_stats=_trainable(op, teacher.layers[i]),
        )
        for i, ops in enumerate(pool)
        for op in ops
    }


def pretrain_candidates(
    teacher: TeacherNet,
    pool: list[list[PoolOp]],
    data: DataBundle,
    config: DistillConfig | None = None,
    seed: int = 0,
) -> list[OpPretrainStats]:
    """Train every candidate op against the frozen teacher; returns
    per-op MSE on a fixed probe batch before and after."""
    config = config or DistillConfig()
    teacher.eval()
    for p in teacher.parameters():
        p.requires_grad_(False)

    train_probe = data.train_x[: min(256, len(data.train_x))]
    holdout_probe = data.eval_x[: min(256, len(data.eval_x))]
    with torch.no_grad():
        _, train_acts = teacher.forward_collect(train_probe)
        _, holdout_acts = teacher.forward_collect(holdout_probe)
    train_before = _layer_mse(teacher, pool, train_acts)
    holdout_before = _layer_mse(teacher, pool, holdout_acts)

    params = []
    for i, ops in enumerate(pool):
        for op in ops:
            if _trainable(op, teacher.layers[i]):
                params.extend(op.module.parameters())
    if params:
        opt = torch.optim.SGD(params, lr=config.lr)
        gen = torch.Generator().manual_seed(seed)
        for _ in range(config.epochs):
            for idx in batches(len(data.train_x), config.batch_size, gen):
                with torch.no_grad():
                    _, acts = teacher.forward_collect(data.train_x[idx])
                opt.zero_grad()
                total = 0.0
                for i, ops in enumerate(pool):
                    target = acts[i + 1]
                    for op in ops:
                        if not _trainable(op, teacher.layers[i]):
                            continue
                        op.module.train()
                        total = total + config.gamma_mse * F.mse_loss(op.module(acts[i]), target)
                total.backward()
                opt.step()

    train_after = _layer_mse(teacher, pool, train_acts)
    holdout_after = _layer_mse(teacher, pool, holdout_acts)
    return [
        OpPretrainStats(
            layer_index=i,
            op_id=op.op_id,
            train_mse_before=train_before[(i, op.op_id)],
            train_mse_after=train_after[(i, op.op_id)],
            holdout_mse_before=holdout_before[(i, op.op_id)],
            holdout_mse_after=holdout_after[(i, op.op_id)],
            trained=_trainable(op, teacher.layers[i]),
        )
        for i, ops in enumerate(pool)
        for op in ops
    ]


class Student(nn.Module):
    """Teacher with its searchable layers swapped per a choice vector.
    Modules are shared by reference; deep-copy before training it."""

    def __init__(self, teacher: TeacherNet, pool: list[list[PoolOp]], choices):
        super().__init__()
        if len(choices) != len(pool):
            raise ValueError(f"{len(choices)} choices for {len(pool)} layers")
        self.stem = teacher.stem
        self.blocks = nn.ModuleList(pool[i][c].module for i, c in enumerate(choices))
        self.head = teacher.head

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x = self.stem(x)
        for block in self.blocks:
            x = block(x)
        return self.head(x)


def assemble(teacher: TeacherNet, pool: list[list[PoolOp]], choices) -> Student:
    return Student(teacher, pool, tuple(choices))


def measure_loss_deltas(
    teacher: TeacherNet,
    pool: list[list[PoolOp]],
    data: DataBundle,
) -> dict[tuple[int, str], float]:
    """Plug each candidate op into the teacher one at a time and measure
    the change in cross-entropy on the fixed eval subset. The teacher's
    own op reproduces the teacher network, so its delta is exactly 0."""
    teacher.eval()
    base_choices = [next(i for i, op in enumerate(ops) if op.op_id == "teacher") for ops in pool]
    base_loss, _ = evaluate(teacher, data.eval_x, data.eval_y)
    deltas: dict[tuple[int, str], float] = {}
    for layer_idx, ops in enumerate(pool):
        for op_idx, op in enumerate(ops):
            choices = list(base_choices)
            choices[layer_idx] = op_idx
            student = assemble(teacher, pool, choices)
            loss, _ = evaluate(student, data.eval_x, data.eval_y)
            deltas[(layer_idx, op.op_id)] = loss - base_loss
    return deltas
