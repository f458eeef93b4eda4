"""Singular numbers, Schatten quasi-norms and operator bounds between weighted M^2 spaces.

Between two Hilbert spaces the nuclear quasi-norm of order ``p`` coincides with
the Schatten quasi-norm, so for ``p <= 1`` :func:`schatten_quasi_norm` of the
conjugated matrix also serves as the nuclear value.  Nuclear quasi-norms between
non-Hilbert modulation spaces are not computed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ExponentViolation, MemoryGuard, NumericalFailure
from .gabor import GaborSystem, analysis_matrix, frame_bounds, gaussian_window, lattice_indices, synthesis_matrix
from .lattice import GridSpec, OperatorMatrix, SampledField
from .psdo import amplitude_mod_norm, extend_symbol, op_from_amplitude, random_symbol
from .runtime import pmap
from .weights import ONE, Weight, eval_on_grid, is_trivial

MAX_DENSE = 4096


@dataclass(frozen=True)
class SingularSpectrum:
    values: np.ndarray
    source: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if np.any(v < 0) or np.any(np.diff(v) > 0):
            raise ValueError("singular values must be nonnegative and nonincreasing")
        object.__setattr__(self, "values", v)


def singular_values(T: OperatorMatrix | np.ndarray) -> SingularSpectrum:
    m = T.entries if isinstance(T, OperatorMatrix) else np.asarray(T, dtype=complex)
    if max(m.shape) > MAX_DENSE:
        raise MemoryGuard(f"dense SVD of a {m.shape} matrix exceeds {MAX_DENSE}")
    try:
        s = np.linalg.svd(m, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"SVD did not converge: {exc}") from exc
    return SingularSpectrum(s, getattr(T, "provenance", "array"))


def schatten_quasi_norm(s: SingularSpectrum | np.ndarray, p: float) -> float:
    """``(sum_j s_j^p)^{1/p}``, or ``s_1`` for ``p = inf``."""
    v = s.values if isinstance(s, SingularSpectrum) else np.asarray(s, dtype=float)
    if not p > 0:
        raise ValueError(f"p must be positive, got {p}")
    if v.size == 0:
        return 0.0
    top = float(np.max(v))
    if p == math.inf or top == 0:
        return top
    # fixed-order scaled sum keeps monotonicity in p exact for a given spectrum
    return top * math.fsum((v / top) ** p) ** (1 / p)


def _coefficient_weight(w: Weight, system: GaborSystem) -> np.ndarray | float:
    if is_trivial(w):
        return 1.0
    spec = system.grid
    xs = spec.coords()[lattice_indices(spec.n, system.a_step)]
    fs = spec.freqs()[lattice_indices(spec.n, system.b_step)]
    return np.asarray(eval_on_grid(w, [xs] * spec.dim + [fs] * spec.dim)).reshape(-1)


def weighted_m2_conjugate(T: OperatorMatrix, omega1: Weight, omega2: Weight, system: GaborSystem) -> OperatorMatrix:
    """``D_{omega2} C T S_gamma D_{omega1}^{-1}`` acting on Gabor coefficients."""
    if system.dual is None:
        system = system.with_dual()
    c = analysis_matrix(system)
    s = synthesis_matrix(system, system.dual)
    w1 = _coefficient_weight(omega1, system)
    w2 = _coefficient_weight(omega2, system)
    core = c @ T.entries @ s
    out = (np.reshape(w2, (-1, 1)) if np.ndim(w2) else w2) * core / (np.reshape(w1, (1, -1)) if np.ndim(w1) else w1)
    return OperatorMatrix(out, None, None, f"M2 conjugate of {T.provenance}")


def conjugate_exponent(p: float) -> float:
    if p <= 1:
        return math.inf
    if p == math.inf:
        return 1.0
    return p / (p - 1)


@dataclass
class SchattenConfig:
    p: float = 2.0
    q: float = 1.0
    omega: Weight = ONE
    omega1: Weight = ONE
    omega2: Weight = ONE
    resolutions: tuple[int, ...] = (12, 16)
    family_size: int = 10
    seed: int = 0
    strides: tuple[int, int] = (1, 1)
    amplitude: Callable[[GridSpec, np.random.Generator], SampledField] | None = None


def default_amplitude(spec: GridSpec, rng: np.random.Generator) -> SampledField:
    """Extension of a random Gaussian-bump symbol with a unit-peak Gaussian."""
    a0 = random_symbol(spec.with_dim(2), rng)
    return extend_symbol(a0, gaussian_window(spec, peak_one=True))


def schatten_bound_experiment(config: SchattenConfig) -> dict:
    """Ratios ``||Op(a)||_{I_p(M^2_{omega1}, M^2_{omega2})} / ||a||_{M^{p,inf,p,q,q,q}_{omega}}`` per resolution."""
    p, q = config.p, config.q
    if q > min(p, conjugate_exponent(p)):
        raise ExponentViolation(f"q = {q} exceeds min(p, p') = {min(p, conjugate_exponent(p))}")
    make = config.amplitude or default_amplitude
    rows = []
    for n in config.resolutions:
        spec = GridSpec.self_dual(1, n)
        system = GaborSystem(spec, *config.strides, gaussian_window(spec)).with_dual()
        lo, hi = frame_bounds(system)
        rng = np.random.default_rng(config.seed)
        amps = [make(spec, rng) for _ in range(config.family_size)]

        def member(a):
            anorm = amplitude_mod_norm(a, None, (p, math.inf, p), (q, q, q), config.omega)
            conj = weighted_m2_conjugate(op_from_amplitude(a), config.omega1, config.omega2, system)
            sv = singular_values(conj)
            value = schatten_quasi_norm(sv, p)
            frob = float(np.linalg.norm(conj.entries))
            i2 = schatten_quasi_norm(sv, 2.0)
            check = abs(i2 - frob) / frob if frob > 0 else 0.0
            if anorm == 0:
                return {"ratio": None, "degenerate": True, "i2_frobenius_error": check}
            return {"ratio": value / anorm, "degenerate": False, "i2_frobenius_error": check}

        members = pmap(member, amps)
        ratios = [m["ratio"] for m in members if not m["degenerate"]]
        rows.append({
            "N": n,
            "max_ratio": max(ratios) if ratios else None,
            "ratios": [m["ratio"] for m in members],
            "degenerate": sum(m["degenerate"] for m in members),
            "i2_frobenius_error": max(m["i2_frobenius_error"] for m in members),
            "frame_bounds": [lo, hi],
        })
    first, last = rows[0]["max_ratio"], rows[-1]["max_ratio"]
    growth = last / first if first and last is not None else math.nan
    return {"p": p, "q": q, "nuclear_surrogate": p <= 1, "resolutions": rows, "growth": growth}
