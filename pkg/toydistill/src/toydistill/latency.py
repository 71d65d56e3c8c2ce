"""Wall-clock latency measurement for candidate ops.

Each op runs on its layer's input shape after warm-up; the raw
per-run milliseconds are kept unaggregated (the lookup-table writer
applies the median downstream). Input and output stems are never
measured: they are not part of the searchable tables.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import torch
from torch import nn

from .pool import PoolOp
from .teacher import TeacherNet


@dataclass(frozen=True)
class RawLatency:
    layer_index: int
    op_id: str
    values_ms: tuple[float, ...]


@torch.no_grad()
def _time_forward(module: nn.Module, x: torch.Tensor, runs: int, warmup: int) -> tuple[float, ...]:
    """Single-threaded timing: intra-op parallelism makes wall times a
    function of machine load, which would leak into the tables."""
    module.eval()
    saved_threads = torch.get_num_threads()
    torch.set_num_threads(1)
    try:
        for _ in range(warmup):
            module(x)
        values = []
        for _ in range(runs):
            start = time.perf_counter()
            module(x)
            values.append((time.perf_counter() - start) * 1000.0)
        return tuple(values)
    finally:
        torch.set_num_threads(saved_threads)


def measure_latency(
    teacher: TeacherNet,
    pool: list[list[PoolOp]],
    batch: int = 32,
    runs: int = 10,
    warmup: int = 3,
    seed: int = 0,
) -> list[RawLatency]:
    gen = torch.Generator().manual_seed(seed)
    samples = []
    for layer_idx, (shape, ops) in enumerate(zip(teacher.spec.layer_shapes(), pool)):
        x = torch.randn((batch, *shape.in_shape), generator=gen)
        for op in ops:
            samples.append(RawLatency(layer_idx, op.op_id, _time_forward(op.module, x, runs, warmup)))
    return samples


@torch.no_grad()
def measure_network_forward_ms(model: nn.Module, batch: int = 32, image_size: int = 32,
                               runs: int = 10, warmup: int = 3, seed: int = 0) -> tuple[float, ...]:
    """Whole-network forward time, for comparing against the summed
    lookup table (stems excluded there, so the table reads lower)."""
    gen = torch.Generator().manual_seed(seed)
    x = torch.randn((batch, 3, image_size, image_size), generator=gen)
    return _time_forward(model, x, runs, warmup)
