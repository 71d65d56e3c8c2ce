"""Instance-file emission.

Writes the search package's JSON schema directly (this package talks to
the search tooling only through its files and CLI, never its library).
Latency samples collapse to the lower median, the same documented rule
the search side uses for raw measurements.
"""

from __future__ import annotations

import json
from typing import Iterable, Mapping

from .latency import RawLatency
from .pool import PoolOp

FORMAT_VERSION = 1


def lower_median(values: Iterable[float]) -> float:
    ordered = sorted(values)
    if not ordered:
        raise ValueError("no values to aggregate")
    return ordered[(len(ordered) - 1) // 2]


def build_instance_doc(
    name: str,
    pool: list[list[PoolOp]],
    deltas: Mapping[tuple[int, str], float],
    latencies: Iterable[RawLatency],
    provenance: Mapping[str, object] | None = None,
) -> dict:
    cost_by_key = {}
    for sample in latencies:
        cost_by_key.setdefault((sample.layer_index, sample.op_id), []).extend(sample.values_ms)
    layers = []
    for layer_idx, ops in enumerate(pool):
        entries = []
        t_index = None
        for op_idx, op in enumerate(ops):
            if op.op_id == "teacher":
                t_index = op_idx
            delta = deltas[(layer_idx, op.op_id)]
            entries.append({
                "op_id": op.op_id,
                # the teacher swap reproduces the teacher network, so its
                # delta is stored as an exact zero
                "score_delta": 0 if op.op_id == "teacher" else delta,
                "cost": lower_median(cost_by_key[(layer_idx, op.op_id)]),
                "tags": list(op.tags),
            })
        if t_index is None:
            raise ValueError(f"layer {layer_idx}: pool has no teacher op")
        layers.append({"layer_index": layer_idx, "teacher_index": t_index, "ops": entries})
    doc: dict = {"format_version": FORMAT_VERSION, "name": name, "cost_unit": "ms"}
    if provenance:
        doc["provenance"] = dict(provenance)
    doc["layers"] = layers
    return doc


def write_instance_file(path: str, doc: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(doc, fh, indent=2, ensure_ascii=False)
        fh.write("\n")


def write_measured_scores_file(
    path: str, instance_name: str, entries: Iterable[tuple[Iterable[int], float]]
) -> None:
    doc = {
        "instance": instance_name,
        "entries": [
            {"choices": [int(c) for c in choices], "measured": float(score)}
            for choices, score in entries
        ],
    }
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(doc, fh, indent=2, ensure_ascii=False)
        fh.write("\n")


def read_instance_file(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
