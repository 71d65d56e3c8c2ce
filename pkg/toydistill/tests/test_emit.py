import json
import random

import pytest

from toydistill.emit import build_instance_doc, lower_median, write_instance_file
from toydistill.latency import RawLatency
from toydistill.pool import PoolOp

from conftest import run_lana


class _Stub:
    pass


def _fake_pool():
    # emit only needs op_id/tags, not working modules
    def op(op_id, tags):
        return PoolOp(op_id, _Stub(), tags)

    return [
        [op("teacher", ("teacher",)), op("identity", ("identity",)), op("conv_a", ("conv",))],
        [op("teacher", ("teacher",)), op("conv_b", ("conv",))],
    ]


def _fake_inputs():
    pool = _fake_pool()
    deltas = {
        (0, "teacher"): 0.0, (0, "identity"): 0.8, (0, "conv_a"): 0.05,
        (1, "teacher"): 0.0, (1, "conv_b"): -0.02,
    }
    latencies = [
        RawLatency(0, "teacher", (1.0, 1.1, 0.9)),
        RawLatency(0, "identity", (0.01, 0.012, 0.009)),
        RawLatency(0, "conv_a", (0.5, 0.55, 0.45)),
        RawLatency(1, "teacher", (2.0, 2.2, 1.8)),
        RawLatency(1, "conv_b", (0.7, 0.75, 0.65)),
    ]
    return pool, deltas, latencies


def test_document_structure():
    pool, deltas, latencies = _fake_inputs()
    doc = build_instance_doc("fabricated", pool, deltas, latencies,
                             provenance={"device": "cpu"})
    assert doc["format_version"] == 1
    assert doc["cost_unit"] == "ms"
    assert [l["layer_index"] for l in doc["layers"]] == [0, 1]
    assert doc["layers"][0]["teacher_index"] == 0
    ops0 = doc["layers"][0]["ops"]
    assert [op["op_id"] for op in ops0] == ["teacher", "identity", "conv_a"]
    assert ops0[0]["score_delta"] == 0
    assert ops0[1]["cost"] == 0.01  # lower median of 3 runs
    assert doc["layers"][1]["ops"][1]["score_delta"] == -0.02


def test_fabricated_document_passes_primary_validator(tmp_path):
    pool, deltas, latencies = _fake_inputs()
    doc = build_instance_doc("fabricated", pool, deltas, latencies)
    path = tmp_path / "fabricated.json"
    write_instance_file(str(path), doc)
    proc = run_lana("validate", path)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert "ok" in proc.stdout


def test_pipeline_instance_passes_primary_validator(artifacts):
    _, instance_path = artifacts
    proc = run_lana("validate", instance_path)
    assert proc.returncode == 0, proc.stdout + proc.stderr


def test_pipeline_instance_teacher_entries_are_zero(artifacts):
    _, instance_path = artifacts
    doc = json.loads(instance_path.read_text(encoding="utf-8"))
    for layer in doc["layers"]:
        assert layer["ops"][layer["teacher_index"]]["score_delta"] == 0


def test_lower_median_matches_sort_index_oracle():
    rng = random.Random(8)
    for _ in range(30):
        n = rng.randint(1, 25)
        values = [rng.uniform(0, 5) for _ in range(n)]
        assert lower_median(values) == sorted(values)[(n - 1) // 2]
    with pytest.raises(ValueError):
        lower_median([])
