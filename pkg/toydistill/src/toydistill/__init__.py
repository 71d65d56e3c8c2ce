"""Desk-scale distillation pipeline producing latency/loss lookup-table
instance files for the search package, via its file schema and CLI."""

from .data import DataBundle, make_dataset
from .distill import (
    DistillConfig,
    OpPretrainStats,
    Student,
    assemble,
    measure_loss_deltas,
    pretrain_candidates,
)
from .emit import (
    build_instance_doc,
    lower_median,
    read_instance_file,
    write_instance_file,
    write_measured_scores_file,
)
from .finetune import FinetuneConfig, assemble_and_finetune
from .latency import RawLatency, measure_latency, measure_network_forward_ms
from .pool import CandidatePoolSpec, PoolOp, build_pool, identity_legal, teacher_index
from .pipeline import (
    PipelineArtifacts,
    PipelineConfig,
    load_config,
    run_pipeline,
    sample_feasible_choices,
    teacher_lut_cost,
    tiny_config,
)
from .teacher import LayerShape, TeacherNet, ToyTeacherSpec, evaluate, train_teacher

__all__ = [
    "CandidatePoolSpec",
    "DataBundle",
    "DistillConfig",
    "FinetuneConfig",
    "LayerShape",
    "OpPretrainStats",
    "PipelineArtifacts",
    "PipelineConfig",
    "PoolOp",
    "RawLatency",
    "Student",
    "TeacherNet",
    "ToyTeacherSpec",
    "assemble",
    "assemble_and_finetune",
    "build_instance_doc",
    "build_pool",
    "evaluate",
    "identity_legal",
    "load_config",
    "lower_median",
    "make_dataset",
    "measure_latency",
    "measure_loss_deltas",
    "measure_network_forward_ms",
    "pretrain_candidates",
    "read_instance_file",
    "run_pipeline",
    "sample_feasible_choices",
    "teacher_index",
    "teacher_lut_cost",
    "tiny_config",
    "train_teacher",
    "write_instance_file",
    "write_measured_scores_file",
]
