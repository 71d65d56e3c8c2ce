"""End-to-end run: dataset, teacher, pool pretraining, measurement and
instance emission, with a JSON config file for all hyperparameters."""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field

import torch

from .data import DataBundle, make_dataset
from .distill import DistillConfig, OpPretrainStats, measure_loss_deltas, pretrain_candidates
from .emit import build_instance_doc, lower_median, write_instance_file
from .latency import RawLatency, measure_latency, measure_network_forward_ms
from .pool import CandidatePoolSpec, PoolOp, build_pool
from .teacher import TeacherNet, ToyTeacherSpec, train_teacher


@dataclass(frozen=True)
class PipelineConfig:
    seed: int = 0
    name: str = "toy-conv8"
    n_train: int = 2048
    n_eval: int = 512
    n_test: int = 512
    teacher_epochs: int = 6
    teacher_lr: float = 0.05
    stem_width: int = 16
    widths: tuple[int, ...] = (16, 32, 32, 32, 64, 64, 64, 64)
    strides: tuple[int, ...] = (1, 2, 1, 1, 2, 1, 1, 1)
    distill: DistillConfig = field(default_factory=DistillConfig)
    latency_batch: int = 128
    latency_runs: int = 10


def tiny_config(seed: int = 0) -> PipelineConfig:
    """Reduced scale for tests: 6 layers, narrow widths, less data."""
    return PipelineConfig(
        seed=seed,
        name=f"toy-tiny-s{seed}",
        n_train=1024,
        n_eval=256,
        n_test=256,
        teacher_epochs=4,
        stem_width=8,
        widths=(8, 16, 16, 32, 32, 32),
        strides=(1, 2, 1, 2, 1, 1),
        latency_runs=10,
    )


def load_config(path: str) -> PipelineConfig:
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    distill = DistillConfig(**raw.pop("distill", {}))
    for key in ("widths", "strides"):
        if key in raw:
            raw[key] = tuple(raw[key])
    return PipelineConfig(distill=distill, **raw)


@dataclass
class PipelineArtifacts:
    config: PipelineConfig
    data: DataBundle
    teacher: TeacherNet
    teacher_accuracy: float
    pool: list[list[PoolOp]]
    pretrain_stats: list[OpPretrainStats]
    deltas: dict[tuple[int, str], float]
    latencies: list[RawLatency]
    instance_doc: dict
    log: dict


def run_pipeline(config: PipelineConfig | None = None, instance_path: str | None = None) -> PipelineArtifacts:
    config = config or PipelineConfig()
    torch.manual_seed(config.seed)
    data = make_dataset(config.seed, config.n_train, config.n_eval, config.n_test)

    teacher = TeacherNet(ToyTeacherSpec(
        stem_width=config.stem_width, widths=config.widths, strides=config.strides,
    ))
    teacher_acc = train_teacher(
        teacher, data, epochs=config.teacher_epochs, lr=config.teacher_lr, seed=config.seed
    )

    pool = build_pool(teacher, CandidatePoolSpec(), seed=config.seed + 1)
    stats = pretrain_candidates(teacher, pool, data, config.distill, seed=config.seed + 2)
    deltas = measure_loss_deltas(teacher, pool, data)
    latencies = measure_latency(
        teacher, pool, batch=config.latency_batch, runs=config.latency_runs, seed=config.seed + 3
    )

    # lookup-table total (stems excluded) vs a whole-network forward
    teacher_lut_ms = sum(
        lower_median(s.values_ms)
        for s in latencies
        if s.op_id == "teacher"
    )
    whole_ms = lower_median(
        measure_network_forward_ms(teacher, batch=config.latency_batch, seed=config.seed + 4)
    )

    doc = build_instance_doc(
        name=config.name,
        pool=pool,
        deltas=deltas,
        latencies=latencies,
        provenance={
            "generator": "toydistill",
            "seed": config.seed,
            "device": "cpu",
            "latency_batch": config.latency_batch,
            "latency_runs": config.latency_runs,
            "teacher_test_accuracy": teacher_acc,
        },
    )
    if instance_path is not None:
        write_instance_file(instance_path, doc)

    log = {
        "teacher_test_accuracy": teacher_acc,
        "teacher_lut_total_ms": teacher_lut_ms,
        "whole_network_forward_ms": whole_ms,
        "lut_vs_forward_ratio": teacher_lut_ms / whole_ms,
        "ops_per_layer": [len(ops) for ops in pool],
        "distill": asdict(config.distill),
    }
    return PipelineArtifacts(
        config=config,
        data=data,
        teacher=teacher,
        teacher_accuracy=teacher_acc,
        pool=pool,
        pretrain_stats=stats,
        deltas=deltas,
        latencies=latencies,
        instance_doc=doc,
        log=log,
    )


def sample_feasible_choices(doc: dict, budget_ms: float, seed: int, max_attempts: int = 200000) -> list[int]:
    """Uniform per-layer rejection sampling over an emitted instance
    document, used to build random-baseline students."""
    rng = random.Random(seed)
    layers = doc["layers"]
    for _ in range(max_attempts):
        choices = [rng.randrange(len(layer["ops"])) for layer in layers]
        cost = sum(layer["ops"][c]["cost"] for layer, c in zip(layers, choices))
        if cost <= budget_ms:
            return choices
    raise RuntimeError(f"no feasible draw within {max_attempts} attempts")


def teacher_lut_cost(doc: dict) -> float:
    return sum(layer["ops"][layer["teacher_index"]]["cost"] for layer in doc["layers"])
