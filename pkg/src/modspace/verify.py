"""Acceptance suites behind ``modspace verify``.

Each check returns a criterion record ``{id, name, measured, tolerance, passed, detail}``.
Checks are seeded; with BLAS pinned to one thread their output is bit-reproducible.
"""
from __future__ import annotations

import math
import time
import warnings
from typing import Callable

import numpy as np

from .gabor import GaborSystem, gabor_coefficients, gabor_synthesis, gaussian_window, stft
from .lattice import GridSpec, SampledField
from .mixed_norm import MixedNormSpec, exp_convolution_check, exp_weight, lattice_coords, mixed_quasi_norm, young_check
from .oracles import nested_mixed_norm
from .psdo import (calculus_transfer, exp_multiplier, extend_symbol, op_from_amplitude, op_from_symbol,
                   random_symbol, reduce_amplitude, separable_gaussian_amplitude)
from .spectral import SchattenConfig, schatten_bound_experiment, schatten_quasi_norm, singular_values
from .trace import DimSplit, TraceExperimentConfig, random_family, stft_trace_identity_residual, trace_bound_experiment
from .weights import ONE, poly_weight

DEFAULT_TOLERANCES = {
    "young": 1e-12,
    "moyal": 1e-6,
    "frame": 1e-8,
    "trace_identity": 1e-5,
    "trace_decrease": 2.0,
    "trace_growth": 1.25,
    "reduce_operator": 1e-6,
    "reduce_roundtrip": 1e-8,
    "reduce_y_independent": 1e-12,
    "transfer": 1e-6,
    "multiplier_roundtrip": 1e-12,
    "oracle": 1e-12,
    "eckart_young": 1e-10,
    "i2_frobenius": 1e-10,
    "schatten_growth": 1.3,
    "schatten_i2": 1e-6,
}

SUITES = {
    "young": (1, 2, 9),
    "moyal": (3, 4),
    "trace": (5, 6),
    "reduce": (7,),
    "transfer": (8,),
    "schatten": (10, 11),
}


def _record(cid: int, name: str, measured, tolerance, passed: bool, **detail) -> dict:
    return {"id": cid, "name": name, "measured": measured, "tolerance": tolerance,
            "passed": bool(passed), "detail": detail}


def _rng(seed: int, salt: int) -> np.random.Generator:
    return np.random.default_rng([seed, salt])


def check_young(tol: dict, seed: int) -> dict:
    rng = _rng(seed, 1)
    pairs = {"trivial": (ONE, ONE), "bracket2": (poly_weight(2, 1), poly_weight(2, 1)),
             "exp1": (exp_weight(1.0), exp_weight(1.0))}
    worst = -math.inf
    trials = 0
    per_p = {}
    with warnings.catch_warnings():
        # the bracket pair is moderate only up to a factor 2
        warnings.simplefilter("ignore")
        for p in (0.5, 1.0, 2.0, math.inf):
            excess = -math.inf
            for name, (omega, v) in pairs.items():
                for _ in range(200):
                    n = int(rng.integers(8, 17))
                    x = np.abs(lattice_coords(n))
                    f1 = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * np.exp(-rng.uniform(0, 1.5) * x)
                    f2 = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * np.exp(-rng.uniform(1, 2) * x)
                    lhs, rhs = young_check(f1, f2, p, omega, v)
                    excess = max(excess, lhs - rhs)
                    trials += 1
            per_p[str(p)] = excess
            worst = max(worst, excess)
    return _record(1, "weighted Young inequality", worst, tol["young"], worst <= tol["young"],
                   trials=trials, max_excess_per_p=per_p)


def check_exp_convolution(tol: dict, seed: int) -> dict:
    n = 16
    f = np.exp(-np.abs(lattice_coords(n)))
    omega = exp_weight(1.0)
    good = exp_convolution_check(f, 1.0, omega, 2.0)
    bad = exp_convolution_check(f, 1.0, omega, 0.5)
    passed = good.admissible and not bad.admissible and good.lhs <= good.rhs
    return _record(2, "exponential kernel convolution", [good.admissible, bad.admissible], [True, False], passed,
                   kernel_norms_r2=list(good.kernel_norms), kernel_norms_r05=list(bad.kernel_norms))


def check_moyal(tol: dict, seed: int) -> dict:
    spec = GridSpec.self_dual(1, 64)
    win = gaussian_window(spec)
    phi2 = win.grid_norm ** 2
    worst = 0.0
    for f in random_family(spec, 20, seed):
        v = stft(f, win)
        total = float(np.sum(np.abs(v.values) ** 2)) * spec.step * spec.freq_step
        ref = f.l2_norm() ** 2 * phi2
        worst = max(worst, abs(total - ref) / ref)
    return _record(3, "Moyal identity", worst, tol["moyal"], worst <= tol["moyal"])


def check_frame(tol: dict, seed: int) -> dict:
    spec = GridSpec.self_dual(1, 48)
    system = GaborSystem(spec, 4, 4, gaussian_window(spec)).with_dual()
    worst = 0.0
    for f in random_family(spec, 20, seed):
        back = gabor_synthesis(gabor_coefficients(f, system), system.dual)
        worst = max(worst, float(np.linalg.norm(back.values - f.values) / np.linalg.norm(f.values)))
    return _record(4, "Gabor frame round trip", worst, tol["frame"], worst <= tol["frame"])


def _trace_residual(n: int, seed: int) -> float:
    split = DimSplit(1, 1, 0)
    spec = GridSpec.self_dual(2, n)
    phi0 = gaussian_window(spec.with_dim(1))
    return max(stft_trace_identity_residual(f, split, phi0, phi0) for f in random_family(spec, 10, seed))


def check_trace_identity(tol: dict, seed: int) -> dict:
    coarse = _trace_residual(16, seed)
    fine = _trace_residual(32, seed)
    decrease = coarse / fine if fine > 0 else math.inf
    passed = fine <= tol["trace_identity"] and decrease >= tol["trace_decrease"]
    return _record(5, "STFT trace identity", fine, tol["trace_identity"], passed,
                   residual_n16=coarse, decrease=decrease, required_decrease=tol["trace_decrease"])


def check_trace_bound(tol: dict, seed: int) -> dict:
    report = trace_bound_experiment(TraceExperimentConfig(seed=seed))
    finite = all(math.isfinite(r["R"]) for r in report["resolutions"])
    passed = finite and report["growth"] <= tol["trace_growth"] and report["right_inverse_error"] == 0.0
    return _record(6, "trace boundedness (Sobolev weights)", report["growth"], tol["trace_growth"], passed,
                   **report)


def _rel_fro(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b) / np.linalg.norm(a))


def check_reduce(tol: dict, seed: int) -> dict:
    spec = GridSpec.self_dual(1, 32)
    spec2, spec3 = spec.with_dim(2), spec.with_dim(3)
    rng = _rng(seed, 7)
    op_err = 0.0
    for _ in range(10):
        a = separable_gaussian_amplitude(spec3, rng)
        op_err = max(op_err, _rel_fro(op_from_amplitude(a).entries,
                                      op_from_symbol(reduce_amplitude(a), 0).entries))
    phi = gaussian_window(spec, peak_one=True)
    rt_err = 0.0
    y_err = 0.0
    for _ in range(10):
        a0 = random_symbol(spec2, rng)
        back = reduce_amplitude(extend_symbol(a0, phi))
        scale = np.max(np.abs(a0.values))
        rt_err = max(rt_err, float(np.max(np.abs(back.values - a0.values)) / scale))
        flat = SampledField(spec3, np.broadcast_to(a0.values[:, None, :], spec3.shape))
        y_err = max(y_err, float(np.max(np.abs(reduce_amplitude(flat).values - a0.values)) / scale))
    passed = (op_err <= tol["reduce_operator"] and rt_err <= tol["reduce_roundtrip"]
              and y_err <= tol["reduce_y_independent"])
    return _record(7, "amplitude reduction and extension", [op_err, rt_err, y_err],
                   [tol["reduce_operator"], tol["reduce_roundtrip"], tol["reduce_y_independent"]], passed)


def check_transfer(tol: dict, seed: int) -> dict:
    spec2 = GridSpec.self_dual(2, 32)
    rng = _rng(seed, 8)
    worst = 0.0
    rt = 0.0
    for _ in range(10):
        a = random_symbol(spec2, rng)
        kn = calculus_transfer(a, 0.5, 0.0)
        worst = max(worst, _rel_fro(op_from_symbol(a, 0.5).entries, op_from_symbol(kn, 0.0).entries))
        back = exp_multiplier(exp_multiplier(a, (0,), (1,), +1, 1.0), (0,), (1,), -1, 1.0)
        rt = max(rt, float(np.max(np.abs(back.values - a.values)) / np.max(np.abs(a.values))))
    passed = worst <= tol["transfer"] and rt <= tol["multiplier_roundtrip"]
    return _record(8, "Weyl to Kohn-Nirenberg transfer", [worst, rt],
                   [tol["transfer"], tol["multiplier_roundtrip"]], passed)


def check_oracle(tol: dict, seed: int) -> dict:
    rng = _rng(seed, 9)
    choices = np.array([0.5, 1.0, 1.5, 2.0, 3.0, math.inf])
    worst = 0.0
    for _ in range(100):
        rank = int(rng.integers(1, 4))
        shape = tuple(int(s) for s in rng.integers(1, 4, size=rank))
        F = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        p = tuple(float(e) for e in rng.choice(choices, size=rank))
        perm = tuple(int(j) for j in rng.permutation(rank))
        cells = tuple(float(c) for c in rng.uniform(0.5, 2.0, size=rank))
        fast = mixed_quasi_norm(F, MixedNormSpec(p, perm, ONE, cells))
        slow = nested_mixed_norm(F, p, perm, cells)
        worst = max(worst, abs(fast - slow) / max(1.0, slow))
    violations = 0
    for _ in range(200):
        rank = int(rng.integers(1, 4))
        shape = tuple(int(s) for s in rng.integers(1, 4, size=rank))
        p = tuple(float(e) for e in rng.choice(choices, size=rank))
        spec = MixedNormSpec(p, tuple(int(j) for j in rng.permutation(rank)))
        F, G = rng.standard_normal(shape), rng.standard_normal(shape)
        r = spec.r_exponent
        lhs = mixed_quasi_norm(F + G, spec) ** r
        rhs = mixed_quasi_norm(F, spec) ** r + mixed_quasi_norm(G, spec) ** r
        violations += lhs > rhs * (1 + 1e-12)
    passed = worst <= tol["oracle"] and violations == 0
    return _record(9, "mixed-norm oracle and r-triangle", worst, tol["oracle"], passed,
                   r_triangle_violations=int(violations))


def check_spectral(tol: dict, seed: int) -> dict:
    rng = _rng(seed, 10)
    ey = 0.0
    i2 = 0.0
    monotone = True
    ps = (0.25, 0.5, 1.0, 1.5, 2.0, 4.0, math.inf)
    for _ in range(50):
        m, n = (int(s) for s in rng.integers(2, 17, size=2))
        T = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
        u, s, vh = np.linalg.svd(T)
        t1 = s[0] * np.outer(u[:, 0], vh[0])
        ey = max(ey, abs(np.linalg.norm(T - t1, 2) - s[1]) / s[0])
        spec = singular_values(T)
        i2 = max(i2, abs(schatten_quasi_norm(spec, 2.0) - np.linalg.norm(T)) / np.linalg.norm(T))
        vals = [schatten_quasi_norm(spec, p) for p in ps]
        monotone &= all(a >= b for a, b in zip(vals, vals[1:]))
    passed = ey <= tol["eckart_young"] and i2 <= tol["i2_frobenius"] and monotone
    return _record(10, "singular values and Schatten norms", [ey, i2], [tol["eckart_young"], tol["i2_frobenius"]],
                   passed, monotone_in_p=bool(monotone))


def check_schatten_bound(tol: dict, seed: int) -> dict:
    report = schatten_bound_experiment(SchattenConfig(seed=seed))
    i2 = max(r["i2_frobenius_error"] for r in report["resolutions"])
    passed = report["growth"] <= tol["schatten_growth"] and i2 <= tol["schatten_i2"]
    return _record(11, "Schatten bound for amplitude operators", [report["growth"], i2],
                   [tol["schatten_growth"], tol["schatten_i2"]], passed, **report)


CHECKS: dict[int, Callable[[dict, int], dict]] = {
    1: check_young, 2: check_exp_convolution, 3: check_moyal, 4: check_frame,
    5: check_trace_identity, 6: check_trace_bound, 7: check_reduce, 8: check_transfer,
    9: check_oracle, 10: check_spectral, 11: check_schatten_bound,
}


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def run_suite(suite: str, manifest: dict | None = None, deterministic: bool = False) -> dict:
    if suite != "all" and suite not in SUITES:
        raise KeyError(suite)
    manifest = manifest or {}
    tol = dict(DEFAULT_TOLERANCES)
    unknown = set(manifest.get("tolerances", {})) - set(tol)
    if unknown:
        raise ValueError(f"unknown tolerance keys: {sorted(unknown)}")
    tol.update(manifest.get("tolerances", {}))
    seed = int(manifest.get("seed", 0))
    ids = sorted(set().union(*SUITES.values())) if suite == "all" else SUITES[suite]
    start = time.perf_counter()
    criteria = []
    for cid in ids:
        t0 = time.perf_counter()
        rec = CHECKS[cid](tol, seed)
        if not deterministic:
            rec["wall_time"] = time.perf_counter() - t0
        criteria.append(rec)
    report = {
        "kind": "verify",
        "suite": suite,
        "inputs": {"seed": seed, "tolerances": tol, "deterministic": deterministic},
        "criteria": criteria,
        "passed": all(c["passed"] for c in criteria),
    }
    if not deterministic:
        report["wall_time"] = time.perf_counter() - start
    return _clean(report)
