"""End-to-end checks of the vbsbl command line tool (path in $VBSBL_CLI)."""

import json
import os
import subprocess
from pathlib import Path

import numpy as np
import pytest

CLI = os.environ.get("VBSBL_CLI", "vbsbl")


def run(*args, cwd=None):
    return subprocess.run([CLI, *map(str, args)], capture_output=True, text=True, cwd=cwd)


def write_matrix(path, m):
    m = np.atleast_2d(np.asarray(m, float))
    lines = [f"vbsbl-matrix 1 {m.shape[0]} {m.shape[1]} real"]
    lines += [" ".join(repr(float(v)) for v in row) for row in m]
    path.write_text("\n".join(lines) + "\n")


def solve(tmp_path, y, prior_args, name):
    write_matrix(tmp_path / "y.txt", np.reshape(y, (-1, 1)))
    write_matrix(tmp_path / "phi.txt", np.eye(len(y)))
    out = tmp_path / name
    proc = run("solve", "--y", tmp_path / "y.txt", "--dict", tmp_path / "phi.txt", "--block-size", 2,
               "--fixed-lambda", 1, *prior_args, "--out", out)
    assert proc.returncode == 0, proc.stderr
    return json.loads((out / "result.json").read_text())["result"]


def test_identity_fixture_matches_closed_form(tmp_path):
    # Phi = I decouples the blocks: with lambda = 1 each block sees s = 1 and
    # |q|^2 = y_l^2, so the Jeffreys limit is gamma = d / (||y_i||^2 - d) when
    # ||y_i||^2 > d and the block is pruned otherwise; x_i = y_i / (1 + gamma).
    y = np.array([3.0, -4.0, 0.5, 0.5, 1.2, 1.0])
    res = solve(tmp_path, y, ["--prior", "jeffreys"], "out")
    want_x = np.zeros(6)
    want_gamma = []
    for i in range(3):
        e = float(np.sum(y[2 * i:2 * i + 2] ** 2))
        if e > 2.0:
            g = 2.0 / (e - 2.0)
            want_gamma.append(g)
            want_x[2 * i:2 * i + 2] = y[2 * i:2 * i + 2] / (1.0 + g)
        else:
            want_gamma.append(float("inf"))
    assert res["active_blocks"] == [0, 2]
    assert np.allclose(res["x_hat"], want_x, rtol=1e-9, atol=1e-12)
    got_gamma = [float(g) for g in res["gamma"]]
    assert got_gamma[1] == float("inf")
    assert got_gamma[0] == pytest.approx(want_gamma[0], rel=1e-9)
    assert got_gamma[2] == pytest.approx(want_gamma[2], rel=1e-9)


def test_priors_differ_only_in_support_on_marginal_fixture(tmp_path):
    # the middle block (||y||^2 = 8, alpha = 2) sits between the Jeffreys
    # cutoff (alpha = 1) and the scaled Jeffreys c = 1 cutoff for d = 2
    y = [3.0, -4.0, 2.0, 2.0, 0.1, -0.1]
    jef = solve(tmp_path, y, ["--prior", "jeffreys"], "jef")
    sj = solve(tmp_path, y, ["--prior", "scaled-jeffreys", "--c", "1.0"], "sj")
    assert jef["active_blocks"] == [0, 1]
    assert sj["active_blocks"] == [0]


def test_malformed_header_is_a_parse_error(tmp_path):
    (tmp_path / "y.txt").write_text("vbsbl-matrix 1 two 1 real\n1\n2\n")
    write_matrix(tmp_path / "phi.txt", np.eye(2))
    proc = run("solve", "--y", tmp_path / "y.txt", "--dict", tmp_path / "phi.txt", "--out", tmp_path / "o")
    assert proc.returncode == 2
    assert "ParseError" in proc.stderr


def small_bench_config(tmp_path, **overrides):
    cfg = {"rows": 40, "cols": 80, "block_size": 4, "sparsity": 0.2, "snr_db": 15.0, "trials": 4, "seed": 5}
    cfg.update(overrides)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    return path


def test_fixed_seed_gives_identical_files(tmp_path):
    cfg = small_bench_config(tmp_path)
    for name in ("a", "b"):
        proc = run("synth-bench", "--config", cfg, "--threads", 1 if name == "a" else 2, "--out", tmp_path / name)
        assert proc.returncode == 0, proc.stderr
    a, b = tmp_path / "a", tmp_path / "b"
    assert (a / "trials.csv").read_bytes() == (b / "trials.csv").read_bytes()
    sa = json.loads((a / "summary.json").read_text())
    sb = json.loads((b / "summary.json").read_text())
    assert sa["summary"] == sb["summary"]
    assert sa["version"] and sa["config"]["seed"] == 5


def test_zero_sparsity_is_rejected(tmp_path):
    proc = run("synth-bench", "--config", small_bench_config(tmp_path, sparsity=0.0), "--out", tmp_path / "o")
    assert proc.returncode == 2


def test_threshold_sweep_writes_curves(tmp_path):
    proc = run("threshold-sweep", "--block-sizes", "1,2", "--out", tmp_path / "o")
    assert proc.returncode == 0, proc.stderr
    assert any((tmp_path / "o").iterdir())
