"""Problem and solution data types plus the pure arithmetic on them.

A search instance is a stack of layers. Each layer holds candidate
operations, every op carrying a loss-change score (delta relative to
that layer's teacher op, so the teacher entry is exactly zero) and a
latency cost in milliseconds. A selection picks one op per layer.

All types are immutable after construction and the operations here are
pure functions, so everything is safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

SCORE_TOL = 1e-9  # teacher score_delta must be zero within this


class InvalidSelectionError(ValueError):
    """Selection does not fit the instance (wrong length or op index)."""


@dataclass(frozen=True)
class CandidateOp:
    """One replacement candidate for a layer.

    score_delta is the change in training loss relative to the teacher op
    at the same layer (dimensionless, may be negative); cost is latency
    in milliseconds.
    """

    op_id: str
    score_delta: float
    cost: float
    tags: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "tags", tuple(self.tags))


@dataclass(frozen=True)
class LayerTable:
    """Ordered candidate ops for one layer; teacher_index points at the
    teacher's own op inside ops."""

    layer_index: int
    ops: tuple[CandidateOp, ...]
    teacher_index: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "ops", tuple(self.ops))

    @property
    def teacher_op(self) -> CandidateOp:
        return self.ops[self.teacher_index]


@dataclass(frozen=True)
class SearchInstance:
    """The full problem: N layers of candidate op tables."""

    name: str
    layers: tuple[LayerTable, ...]
    cost_unit: str = "ms"

    def __post_init__(self) -> None:
        object.__setattr__(self, "layers", tuple(self.layers))

    @property
    def num_layers(self) -> int:
        return len(self.layers)


@dataclass(frozen=True)
class Selection:
    """One architecture: a chosen op index per layer."""

    choices: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "choices", tuple(int(c) for c in self.choices))

    def __len__(self) -> int:
        return len(self.choices)


@dataclass(frozen=True)
class Budget:
    """Latency budget in milliseconds. math.inf means unconstrained."""

    limit: float

    def __post_init__(self) -> None:
        if math.isnan(self.limit) or self.limit < 0:
            raise ValueError(f"budget limit must be >= 0, got {self.limit}")


def validate_instance(instance: SearchInstance) -> list[str]:
    """Return every invariant violation as a human-readable string.

    An empty list means the instance is valid. Diagnostics, not errors:
    this never raises.
    """
    violations: list[str] = []
    if instance.cost_unit != "ms":
        violations.append(f"cost_unit must be 'ms', got {instance.cost_unit!r}")
    if instance.num_layers < 1:
        violations.append("instance has no layers")
        return violations
    for pos, layer in enumerate(instance.layers):
        where = f"layer {pos}"
        if layer.layer_index != pos:
            violations.append(
                f"{where}: layer_index is {layer.layer_index}, expected {pos}"
            )
        if not layer.ops:
            violations.append(f"{where}: ops is empty")
            continue
        if not 0 <= layer.teacher_index < len(layer.ops):
            violations.append(
                f"{where}: teacher_index {layer.teacher_index} out of range "
                f"for {len(layer.ops)} ops"
            )
            continue
        seen: set[str] = set()
        for op in layer.ops:
            if op.op_id in seen:
                violations.append(f"{where}: duplicate op_id {op.op_id!r}")
            seen.add(op.op_id)
            if not math.isfinite(op.score_delta):
                violations.append(
                    f"{where}: op {op.op_id!r} score_delta is not finite"
                )
            if not math.isfinite(op.cost) or op.cost < 0:
                violations.append(
                    f"{where}: op {op.op_id!r} cost must be finite and >= 0, "
                    f"got {op.cost}"
                )
        teacher = layer.teacher_op
        if abs(teacher.score_delta) > SCORE_TOL:
            violations.append(
                f"{where}: teacher op {teacher.op_id!r} score_delta "
                f"{teacher.score_delta} is not 0 (scores are deltas vs teacher)"
            )
    if not violations and teacher_cost(instance) <= 0:
        violations.append("total teacher cost must be > 0")
    return violations


def check_selection(instance: SearchInstance, sel: Selection) -> None:
    """Raise InvalidSelectionError unless sel indexes one op per layer."""
    if len(sel.choices) != instance.num_layers:
        raise InvalidSelectionError(
            f"selection has {len(sel.choices)} choices, instance has "
            f"{instance.num_layers} layers"
        )
    for i, c in enumerate(sel.choices):
        if not 0 <= c < len(instance.layers[i].ops):
            raise InvalidSelectionError(
                f"layer {i}: op index {c} out of range for "
                f"{len(instance.layers[i].ops)} ops"
            )


def teacher_selection(instance: SearchInstance) -> Selection:
    return Selection(tuple(layer.teacher_index for layer in instance.layers))


def teacher_cost(instance: SearchInstance) -> float:
    return sum(layer.teacher_op.cost for layer in instance.layers)


def objective(instance: SearchInstance, sel: Selection) -> float:
    """Sum of the chosen ops' score deltas (the linear loss proxy).

    Summed in layer order so repeated calls are bit-identical.
    """
    check_selection(instance, sel)
    total = 0.0
    for layer, c in zip(instance.layers, sel.choices):
        total += layer.ops[c].score_delta
    return total


def cost(instance: SearchInstance, sel: Selection) -> float:
    """Sum of the chosen ops' latency costs in milliseconds."""
    check_selection(instance, sel)
    total = 0.0
    for layer, c in zip(instance.layers, sel.choices):
        total += layer.ops[c].cost
    return total


def overlap(a: Selection, b: Selection) -> int:
    """Number of layers where both selections chose the same op index."""
    if len(a.choices) != len(b.choices):
        raise InvalidSelectionError(
            f"selections have different lengths: {len(a.choices)} vs "
            f"{len(b.choices)}"
        )
    return sum(1 for x, y in zip(a.choices, b.choices) if x == y)


def budget_from_ratio(instance: SearchInstance, ratio: float) -> Budget:
    """Budget at a fraction of the teacher's total cost (1.0 = no speedup)."""
    if not ratio > 0:
        raise ValueError(f"budget ratio must be > 0, got {ratio}")
    return Budget(ratio * teacher_cost(instance))
