import json
import subprocess

import pytest

import toydistill as td


@pytest.fixture(scope="session")
def artifacts(tmp_path_factory):
    """One tiny end-to-end pipeline shared by the whole session."""
    outdir = tmp_path_factory.mktemp("pipeline")
    instance_path = outdir / "instance.json"
    art = td.run_pipeline(td.tiny_config(0), instance_path=str(instance_path))
    return art, instance_path


def run_lana(*args):
    """The search package is consumed strictly through its CLI."""
    return subprocess.run(
        ["lana", *map(str, args)], capture_output=True, text=True
    )


def solve_instance(instance_path, out_path, ratio, k=6, time_limit=10):
    proc = run_lana(
        "solve", instance_path, "--budget-ratio", ratio, "--k", k,
        "--time-limit", time_limit, "--threads", "1", "--out", out_path,
    )
    if proc.returncode != 0:
        raise RuntimeError(f"lana solve failed ({proc.returncode}): {proc.stderr}")
    with open(out_path, "r", encoding="utf-8") as fh:
        return json.load(fh)
