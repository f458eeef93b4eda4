"""Acceptance criteria at their stated tolerances and runtime limits.

Thresholds are spelled out here rather than read from the verify defaults, so a
loosened default cannot turn a red criterion green.  Each test prints one
PASS/FAIL line (visible with ``pytest -s`` or in the captured output).
"""
import math
import os
import subprocess
import sys
import time

import pytest

from modspace.verify import CHECKS, DEFAULT_TOLERANCES

STATED = {
    "young": 1e-12, "moyal": 1e-6, "frame": 1e-8, "trace_identity": 1e-5, "trace_decrease": 2.0,
    "trace_growth": 1.25, "reduce_operator": 1e-6, "reduce_roundtrip": 1e-8, "reduce_y_independent": 1e-12,
    "transfer": 1e-6, "multiplier_roundtrip": 1e-12, "oracle": 1e-12, "eckart_young": 1e-10,
    "i2_frobenius": 1e-10, "schatten_growth": 1.3, "schatten_i2": 1e-6,
}


def report_line(cid, name, ok, measured, seconds, limit):
    status = "PASS" if ok else "FAIL"
    bound = f" (limit {limit}s)" if limit is not None else ""
    print(f"\n[{status}] criterion {cid:>2} {name}: measured={measured} time={seconds:.2f}s{bound}")


def run(cid, limit):
    assert STATED.keys() == DEFAULT_TOLERANCES.keys()
    t0 = time.perf_counter()
    rec = CHECKS[cid](dict(STATED), 0)
    return rec, time.perf_counter() - t0


def test_criterion_01_young():
    rec, dt = run(1, 5)
    ok = rec["measured"] <= 1e-12 and rec["detail"]["trials"] == 2400 and dt < 5
    report_line(1, rec["name"], ok, rec["measured"], dt, 5)
    assert ok


def test_criterion_02_exponential_kernel():
    rec, dt = run(2, 5)
    ok = list(rec["measured"]) == [True, False] and dt < 5
    report_line(2, rec["name"], ok, rec["measured"], dt, 5)
    assert ok


def test_criterion_03_moyal():
    rec, dt = run(3, 10)
    ok = rec["measured"] <= 1e-6 and dt < 10
    report_line(3, rec["name"], ok, rec["measured"], dt, 10)
    assert ok


def test_criterion_04_frame_round_trip():
    rec, dt = run(4, 30)
    ok = rec["measured"] <= 1e-8 and dt < 30
    report_line(4, rec["name"], ok, rec["measured"], dt, 30)
    assert ok


def test_criterion_05_trace_identity():
    rec, dt = run(5, 60)
    ok = rec["measured"] <= 1e-5 and rec["detail"]["decrease"] >= 2.0 and dt < 60
    report_line(5, rec["name"], ok, rec["measured"], dt, 60)
    assert ok


def test_criterion_06_trace_boundedness():
    rec, dt = run(6, 120)
    d = rec["detail"]
    ok = (all(math.isfinite(r["R"]) for r in d["resolutions"]) and d["growth"] <= 1.25
          and d["right_inverse_error"] == 0.0 and dt < 120)
    report_line(6, rec["name"], ok, d["growth"], dt, 120)
    assert ok


def test_criterion_07_reduction_extension():
    rec, dt = run(7, 60)
    op, rt, yi = rec["measured"]
    ok = op <= 1e-6 and rt <= 1e-8 and yi <= 1e-12 and dt < 60
    report_line(7, rec["name"], ok, rec["measured"], dt, 60)
    assert ok


def test_criterion_08_calculus_transfer():
    rec, dt = run(8, 30)
    mat, mult = rec["measured"]
    ok = mat <= 1e-6 and mult <= 1e-12 and dt < 30
    report_line(8, rec["name"], ok, rec["measured"], dt, 30)
    assert ok


def test_criterion_09_mixed_norm_oracle():
    rec, dt = run(9, 5)
    ok = rec["measured"] <= 1e-12 and rec["detail"]["r_triangle_violations"] == 0 and dt < 5
    report_line(9, rec["name"], ok, rec["measured"], dt, 5)
    assert ok


def test_criterion_10_spectral():
    rec, dt = run(10, 5)
    ey, i2 = rec["measured"]
    ok = ey <= 1e-10 and i2 <= 1e-10 and rec["detail"]["monotone_in_p"] and dt < 5
    report_line(10, rec["name"], ok, rec["measured"], dt, 5)
    assert ok


@pytest.mark.slow
def test_criterion_11_schatten_bound():
    rec, dt = run(11, 180)
    d = rec["detail"]
    i2 = max(r["i2_frobenius_error"] for r in d["resolutions"])
    ok = d["growth"] <= 1.3 and i2 <= 1e-6 and dt < 180
    report_line(11, rec["name"], ok, d["growth"], dt, 180)
    assert ok


@pytest.mark.slow
def test_criterion_12_determinism(tmp_path):
    blobs = {}
    t0 = time.perf_counter()
    for threads in ("1", "4"):
        out = tmp_path / f"report-{threads}.json"
        env = dict(os.environ, MODSPACE_THREADS=threads)
        proc = subprocess.run([sys.executable, "-m", "modspace.cli", "verify", "all", "--deterministic",
                               "--report", str(out)], env=env, capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        blobs[threads] = out.read_bytes()
    ok = blobs["1"] == blobs["4"]
    report_line(12, "deterministic verify report", ok, f"{len(blobs['1'])} bytes", time.perf_counter() - t0, None)
    assert ok
