"""Student assembly and finetuning with teacher distillation.

The student is the teacher with layers swapped per a selection, loading
the pretrained candidate weights (a deep copy, so the shared pool and
the teacher stay untouched). Finetuning minimises cross entropy plus a
KL term toward the teacher's softened outputs, both weighted 1.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass

import torch
from torch.nn import functional as F

from .data import DataBundle
from .distill import Student, assemble
from .pool import PoolOp
from .teacher import TeacherNet, batches, evaluate


@dataclass(frozen=True)
class FinetuneConfig:
    epochs: int = 10
    lr: float = 0.05
    batch_size: int = 64
    gamma_ce: float = 1.0
    gamma_kl: float = 1.0


def assemble_and_finetune(
    teacher: TeacherNet,
    pool: list[list[PoolOp]],
    choices,
    data: DataBundle,
    config: FinetuneConfig | None = None,
    seed: int = 0,
) -> tuple[Student, float]:
    """Returns the (trained) student and its test accuracy. With zero
    epochs the pretrained weights are evaluated as loaded, so an
    all-teacher selection scores exactly the teacher's accuracy."""
    config = config or FinetuneConfig()
    student = copy.deepcopy(assemble(teacher, pool, choices))
    # the copy inherits frozen teacher-side parameters; the student
    # trains end to end
    for p in student.parameters():
        p.requires_grad_(True)
    if config.epochs == 0:
        return student, evaluate(student, data.test_x, data.test_y)[1]

    teacher.eval()
    opt = torch.optim.SGD(student.parameters(), lr=config.lr, momentum=0.9)
    gen = torch.Generator().manual_seed(seed)
    student.train()
    for _ in range(config.epochs):
        for idx in batches(len(data.train_x), config.batch_size, gen):
            x, y = data.train_x[idx], data.train_y[idx]
            with torch.no_grad():
                teacher_logits = teacher(x)
            opt.zero_grad()
            logits = student(x)
            loss = config.gamma_ce * F.cross_entropy(logits, y)
            loss = loss + config.gamma_kl * F.kl_div(
                F.log_softmax(logits, dim=1),
                F.softmax(teacher_logits, dim=1),
                reduction="batchmean",
            )
            loss.backward()
            opt.step()
    student.eval()
    return student, evaluate(student, data.test_x, data.test_y)[1]
