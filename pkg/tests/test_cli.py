import json
import os
import subprocess
import sys

import numpy as np
import pytest

PKG_SRC = os.path.join(os.path.dirname(__file__), "..", "src")


def run_cli(args, env_extra=None):
    env = dict(os.environ)
    env["PYTHONPATH"] = PKG_SRC + os.pathsep + env.get("PYTHONPATH", "")
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "ttdlra.cli"] + args,
        capture_output=True,
        text=True,
        env=env,
    )


def write_config(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh)
    return str(path)


def heat_config(**kw):
    cfg = {
        "problem": {
            "dims": 2,
            "cells": 8,
            "b0": [[1.0, 0.25], [0.25, 1.0]],
            "t_end": 0.05,
            "tau": 0.005,
            "scheme": "projected_euler",
            "tt_ranks": [2],
            "initial": [
                {"coefficient": 1.0, "profiles": [{"kind": "sine", "frequency": 1}] * 2},
                {"coefficient": 0.4, "profiles": [{"kind": "sine", "frequency": 2}] * 2},
            ],
        },
        "seed": 0,
    }
    cfg.update(kw)
    return cfg


def test_solve_command_ok(tmp_path):
    cfg = write_config(tmp_path / "c.json", heat_config())
    out = tmp_path / "out"
    proc = run_cli(["solve", "--config", cfg, "--out", str(out)])
    assert proc.returncode == 0, proc.stderr
    assert (out / "trajectory.csv").exists()
    assert (out / "metadata.json").exists()
    assert "states:" in proc.stdout


def test_solve_breakdown_exit_code(tmp_path):
    payload = heat_config()
    payload["problem"]["t_end"] = 0.4
    payload["problem"]["cells"] = 12
    payload["problem"]["tau"] = 0.0025
    payload["problem"]["b0"] = [[1.0, 0.0], [0.0, 1.0]]
    payload["problem"]["initial"] = [
        {"coefficient": 1.0, "profiles": [{"kind": "sine", "frequency": 1}] * 2},
        {"coefficient": 0.15, "profiles": [{"kind": "sine", "frequency": 3}] * 2},
    ]
    cfg = write_config(tmp_path / "c.json", payload)
    out = tmp_path / "out"
    proc = run_cli(["solve", "--config", cfg, "--out", str(out)])
    assert proc.returncode == 3, proc.stdout + proc.stderr
    meta = json.load(open(out / "metadata.json"))
    assert meta["breakdown"] is not None
    assert meta["breakdown"]["time"] < 0.4
    # recorded gap sits at or below the relative threshold
    rows = open(out / "trajectory.csv").read().strip().split("\n")[2:]
    last = rows[-1].split(",")
    assert float(last[1]) <= 1e-8 * np.sqrt(float(last[2]))


def test_config_error_exit_code(tmp_path):
    cfg = write_config(tmp_path / "broken.json", {"problem": {"dims": "x"}})
    proc = run_cli(["solve", "--config", cfg, "--out", str(tmp_path / "o")])
    assert proc.returncode == 2
    assert "configuration error" in proc.stderr
    proc = run_cli(["solve", "--config", str(tmp_path / "missing.json")])
    assert proc.returncode == 2


def test_ladder_validation_exit_code(tmp_path):
    payload = heat_config(ladder=[8, 4], reference_cells=16)
    cfg = write_config(tmp_path / "c.json", payload)
    proc = run_cli(["converge", "--config", cfg, "--out", str(tmp_path / "o")])
    assert proc.returncode == 2


def test_determinism_byte_identical(tmp_path):
    cfg = write_config(tmp_path / "c.json", heat_config(seed=7))
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    p1 = run_cli(["solve", "--config", cfg, "--out", str(out1)])
    p2 = run_cli(["solve", "--config", cfg, "--out", str(out2)])
    assert p1.returncode == 0 and p2.returncode == 0
    body = lambda p: open(p / "trajectory.csv", "rb").read().split(b"\n", 1)[1]
    assert body(out1) == body(out2)
    meta1 = json.load(open(out1 / "metadata.json"))
    meta2 = json.load(open(out2 / "metadata.json"))
    meta1.pop("out_dir", None), meta2.pop("out_dir", None)
    assert meta1 == meta2


def test_threads_env_override(tmp_path):
    cfg = write_config(tmp_path / "c.json", heat_config())
    proc = run_cli(
        ["solve", "--config", cfg, "--out", str(tmp_path / "o"), "--threads", "2"],
        env_extra={"TTDLRA_THREADS": "not-a-number"},
    )
    assert proc.returncode == 2
    proc = run_cli(
        ["solve", "--config", cfg, "--out", str(tmp_path / "o")],
        env_extra={"TTDLRA_THREADS": "2"},
    )
    assert proc.returncode == 0


def test_curvature_command(tmp_path):
    payload = {
        "seed": 1,
        "suite": {
            "matrix_pairs": 6,
            "aligned_draws": 12,
            "truncation_instances": 4,
            "heuristic_pairs": 2,
        },
    }
    cfg = write_config(tmp_path / "c.json", payload)
    proc = run_cli(["curvature", "--config", cfg, "--out", str(tmp_path / "o")])
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert "violations" in proc.stdout


def test_diagnose_command(tmp_path):
    cfg = write_config(tmp_path / "c.json", heat_config())
    proc = run_cli(["diagnose", "--config", cfg, "--out", str(tmp_path / "o")])
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert "tangency_ok: True" in proc.stdout


def test_kind_mismatch_is_config_error(tmp_path):
    payload = heat_config(kind="stability", deltas=[0.01])
    cfg = write_config(tmp_path / "c.json", payload)
    proc = run_cli(["solve", "--config", cfg])
    assert proc.returncode == 2
