"""Instance and report files, plus raw-measurement aggregation.

The on-disk instance format is a single UTF-8 JSON document, one file
per instance.  Field names and their order are fixed so that writes are
byte-deterministic and files diff cleanly:

    format_version, name, cost_unit, [provenance], layers
    layer: layer_index, teacher_index, ops
    op:    op_id, score_delta, cost, [tags]

Numbers are rendered with Python's shortest round-trip float repr; any
zero (including -0.0) is canonicalised to the integer 0.  A document may
carry absolute losses instead of deltas by setting "scores_absolute":
true, in which case the per-layer teacher score is subtracted at parse
time so the in-memory model stays canonical.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Mapping

from .core import (
    CandidateOp,
    LayerTable,
    SearchInstance,
    Selection,
    validate_instance,
)

FORMAT_VERSION = 1

METRIC_LATENCY_MS = "latency_ms"
METRIC_LOSS_DELTA = "loss_delta"
_METRICS = (METRIC_LATENCY_MS, METRIC_LOSS_DELTA)


class InstanceSyntaxError(ValueError):
    """Input is not well-formed JSON; message carries line and column."""


class SchemaError(ValueError):
    """Document is JSON but misses a field or has a wrong type."""


class InstanceValidationError(ValueError):
    """Parsed instance violates model invariants."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(violations))


@dataclass(frozen=True)
class MeasurementSample:
    """Raw repeated-run observations for one (layer, op, metric)."""

    op_id: str
    layer_index: int
    metric: str
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.metric not in _METRICS:
            raise ValueError(f"unknown metric {self.metric!r}, expected one of {_METRICS}")
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ValueError("values must be non-empty")
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("values must all be finite")
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class InstanceDocument:
    """A parsed instance file: the instance plus file-level metadata."""

    instance: SearchInstance
    provenance: dict[str, Any]
    format_version: int = FORMAT_VERSION


def _want(obj: Mapping[str, Any], key: str, kind: type, where: str) -> Any:
    if key not in obj:
        raise SchemaError(f"{where}: missing required field {key!r}")
    val = obj[key]
    if kind is float:
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise SchemaError(f"{where}: field {key!r} must be a number, got {type(val).__name__}")
        return float(val)
    if kind is int and (isinstance(val, bool) or not isinstance(val, int)):
        raise SchemaError(f"{where}: field {key!r} must be an integer, got {type(val).__name__}")
    if kind in (str, list, dict, bool) and not isinstance(val, kind):
        raise SchemaError(f"{where}: field {key!r} must be {kind.__name__}, got {type(val).__name__}")
    return val


def parse_document(text: str) -> InstanceDocument:
    """Parse and validate a full instance document."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceSyntaxError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(raw, dict):
        raise SchemaError("top level must be an object")

    version = _want(raw, "format_version", int, "document")
    if version != FORMAT_VERSION:
        raise SchemaError(f"unsupported format_version {version}, expected {FORMAT_VERSION}")
    name = _want(raw, "name", str, "document")
    cost_unit = _want(raw, "cost_unit", str, "document")
    scores_absolute = bool(raw.get("scores_absolute", False))
    provenance = raw.get("provenance", {})
    if not isinstance(provenance, dict):
        raise SchemaError("document: field 'provenance' must be an object")

    layers_raw = _want(raw, "layers", list, "document")
    layers: list[LayerTable] = []
    for li, layer_raw in enumerate(layers_raw):
        where = f"layers[{li}]"
        if not isinstance(layer_raw, dict):
            raise SchemaError(f"{where}: must be an object")
        layer_index = _want(layer_raw, "layer_index", int, where)
        teacher_index = _want(layer_raw, "teacher_index", int, where)
        ops_raw = _want(layer_raw, "ops", list, where)
        ops: list[CandidateOp] = []
        for oi, op_raw in enumerate(ops_raw):
            op_where = f"{where}.ops[{oi}]"
            if not isinstance(op_raw, dict):
                raise SchemaError(f"{op_where}: must be an object")
            op_id = _want(op_raw, "op_id", str, op_where)
            score = _want(op_raw, "score_delta", float, op_where)
            op_cost = _want(op_raw, "cost", float, op_where)
            tags_raw = op_raw.get("tags", [])
            if not isinstance(tags_raw, list) or not all(isinstance(t, str) for t in tags_raw):
                raise SchemaError(f"{op_where}: field 'tags' must be a list of strings")
            ops.append(CandidateOp(op_id=op_id, score_delta=score, cost=op_cost, tags=tuple(tags_raw)))
        if scores_absolute:
            if not 0 <= teacher_index < len(ops):
                raise SchemaError(f"{where}: teacher_index {teacher_index} out of range")
            base = ops[teacher_index].score_delta
            ops = [
                CandidateOp(op.op_id, op.score_delta - base, op.cost, op.tags)
                for op in ops
            ]
        layers.append(LayerTable(layer_index=layer_index, ops=tuple(ops), teacher_index=teacher_index))

    instance = SearchInstance(name=name, layers=tuple(layers), cost_unit=cost_unit)
    violations = validate_instance(instance)
    if violations:
        raise InstanceValidationError(violations)
    return InstanceDocument(instance=instance, provenance=dict(provenance))


def parse_instance(text: str) -> SearchInstance:
    """Parse an instance document, discarding file-level metadata."""
    return parse_document(text).instance


def _num(x: float) -> Any:
    # canonical zero: -0.0 and 0.0 both serialise as integer 0
    if x == 0:
        return 0
    return float(x)


def write_instance(instance: SearchInstance, provenance: Mapping[str, Any] | None = None) -> str:
    """Serialise an instance to the canonical document text.

    Output is byte-deterministic: fixed key order, shortest round-trip
    float rendering, two-space indent, trailing newline.
    """
    violations = validate_instance(instance)
    if violations:
        raise InstanceValidationError(violations)
    doc: dict[str, Any] = {
        "format_version": FORMAT_VERSION,
        "name": instance.name,
        "cost_unit": instance.cost_unit,
    }
    if provenance:
        doc["provenance"] = dict(provenance)
    doc["layers"] = [
        {
            "layer_index": layer.layer_index,
            "teacher_index": layer.teacher_index,
            "ops": [
                {
                    "op_id": op.op_id,
                    "score_delta": _num(op.score_delta),
                    "cost": _num(op.cost),
                    **({"tags": list(op.tags)} if op.tags else {}),
                }
                for op in layer.ops
            ],
        }
        for layer in instance.layers
    ]
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def lower_median(values: Iterable[float]) -> float:
    """Median; for even counts, the lower of the two middle values."""
    ordered = sorted(values)
    if not ordered:
        raise ValueError("cannot aggregate an empty group")
    return ordered[(len(ordered) - 1) // 2]


def aggregate_samples(
    samples: Iterable[MeasurementSample],
) -> dict[tuple[int, str, str], float]:
    """Collapse raw samples into one scalar per (layer, op, metric).

    All values sharing a key are pooled and reduced with lower_median,
    so the result does not depend on sample order.
    """
    groups: dict[tuple[int, str, str], list[float]] = {}
    for s in samples:
        groups.setdefault((s.layer_index, s.op_id, s.metric), []).extend(s.values)
    return {key: lower_median(vals) for key, vals in sorted(groups.items())}


def restrict_pool(
    instance: SearchInstance, keep: Callable[[CandidateOp], bool]
) -> SearchInstance:
    """New instance keeping only ops the predicate accepts.

    The teacher op must survive in every layer; kept ops are untouched
    and the teacher index is remapped.
    """
    new_layers: list[LayerTable] = []
    for layer in instance.layers:
        kept: list[CandidateOp] = []
        new_teacher = -1
        for idx, op in enumerate(layer.ops):
            if keep(op):
                if idx == layer.teacher_index:
                    new_teacher = len(kept)
                kept.append(op)
        if new_teacher < 0:
            raise ValueError(
                f"restrict_pool would drop the teacher op at layer {layer.layer_index}"
            )
        new_layers.append(
            LayerTable(layer_index=layer.layer_index, ops=tuple(kept), teacher_index=new_teacher)
        )
    restricted = SearchInstance(name=instance.name, layers=tuple(new_layers), cost_unit=instance.cost_unit)
    violations = validate_instance(restricted)
    if violations:
        raise InstanceValidationError(violations)
    return restricted


def write_report(
    instance_name: str,
    budget_ms: float,
    overlap_limit: int,
    solutions: Iterable[Mapping[str, Any]],
    wall_time_s: float,
) -> str:
    """Serialise a solve report; same determinism rules as instances.

    Each solution mapping must carry choices, objective, cost_ms, status
    and gap.
    """
    doc = {
        "instance": instance_name,
        "budget_ms": _num(budget_ms),
        "overlap_limit": int(overlap_limit),
        "solutions": [
            {
                "choices": [int(c) for c in sol["choices"]],
                "objective": _num(sol["objective"]),
                "cost_ms": _num(sol["cost_ms"]),
                "status": str(sol["status"]),
                "gap": _num(sol["gap"]),
            }
            for sol in solutions
        ],
        "wall_time_s": _num(wall_time_s),
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def parse_report(text: str) -> dict[str, Any]:
    """Parse a solve report document into plain Python data."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceSyntaxError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(raw, dict):
        raise SchemaError("top level must be an object")
    for key in ("instance", "budget_ms", "overlap_limit", "solutions"):
        if key not in raw:
            raise SchemaError(f"report: missing required field {key!r}")
    sols = raw["solutions"]
    if not isinstance(sols, list):
        raise SchemaError("report: field 'solutions' must be a list")
    for i, sol in enumerate(sols):
        for key in ("choices", "objective", "cost_ms", "status", "gap"):
            if not isinstance(sol, dict) or key not in sol:
                raise SchemaError(f"report: solutions[{i}] missing field {key!r}")
    return raw


def parse_measured_scores(text: str) -> tuple[str, list[tuple[Selection, float]]]:
    """Parse a measured-scores file: {"instance", "entries": [{"choices", "measured"}]}."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceSyntaxError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(raw, dict):
        raise SchemaError("top level must be an object")
    name = _want(raw, "instance", str, "measured-scores")
    entries_raw = _want(raw, "entries", list, "measured-scores")
    entries: list[tuple[Selection, float]] = []
    for i, entry in enumerate(entries_raw):
        where = f"entries[{i}]"
        if not isinstance(entry, dict):
            raise SchemaError(f"{where}: must be an object")
        choices = _want(entry, "choices", list, where)
        measured = _want(entry, "measured", float, where)
        entries.append((Selection(tuple(int(c) for c in choices)), measured))
    return name, entries


def write_measured_scores(instance_name: str, entries: Iterable[tuple[Selection, float]]) -> str:
    doc = {
        "instance": instance_name,
        "entries": [
            {"choices": list(sel.choices), "measured": _num(score)}
            for sel, score in entries
        ],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
