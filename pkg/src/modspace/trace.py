"""Trace map ``f(x1, x2, x3) -> f(x1, z, x3)``, its STFT identity and boundedness experiments.

Axes of a field on ``R^{d1+d2+d3}`` are ordered ``(x1, x2, x3)``; the trace lives on
``(x1, x3)``.  ``d3 = 0`` is the default experiment shape.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InfiniteThetaConstant, ZOffGrid
from .gabor import Window, gaussian_window, modulation_norm, stft
from .lattice import GridSpec, SampledField, dual_grid
from .runtime import pmap
from .weights import ONE, BlockLift, PolyBracket, Product, Weight, trace_weight_constant


@dataclass(frozen=True)
class DimSplit:
    d1: int
    d2: int
    d3: int = 0
    z: tuple[float, ...] | None = None

    def __post_init__(self):
        if min(self.d1, self.d2, self.d3) < 0:
            raise ValueError("block dimensions must be nonnegative")
        z = (0.0,) * self.d2 if self.z is None else tuple(float(t) for t in self.z)
        if len(z) != self.d2:
            raise ValueError(f"z must have {self.d2} components")
        object.__setattr__(self, "z", z)

    @property
    def dim(self) -> int:
        return self.d1 + self.d2 + self.d3

    @property
    def d0(self) -> int:
        return self.d1 + self.d3

    def snap(self, spec: GridSpec) -> tuple[tuple[int, ...], float]:
        """Grid indices of ``z`` (wrapped into the box) and the snap distance."""
        z = np.asarray(self.z)
        idx = spec.index_of(z) % spec.n if self.d2 else np.zeros(0, int)
        snapped = spec.coord_of(idx)
        period = spec.n * spec.step
        diff = (z - snapped + period / 2) % period - period / 2
        return tuple(int(i) for i in idx), float(np.sqrt(np.sum(diff ** 2)))


def _check_split(f: SampledField, split: DimSplit) -> None:
    if f.spec.dim != split.dim:
        raise ValueError(f"field has dim {f.spec.dim}, split expects {split.dim}")


def trace_map(f: SampledField, split: DimSplit, strict: bool = True) -> SampledField:
    _check_split(f, split)
    idx, dist = split.snap(f.spec)
    if dist > 0 and strict:
        raise ZOffGrid(f"z = {split.z} is {dist:.3g} away from the grid")
    sl = (slice(None),) * split.d1 + idx + (slice(None),) * split.d3
    return SampledField(f.spec.with_dim(split.d0), f.values[sl])


def _interleave_window(phi0: Window, phi2: Window, split: DimSplit) -> np.ndarray:
    """Values of ``phi0(x1, x3) phi2(x2)`` on axes ``(x1, x2, x3)``."""
    outer = np.multiply.outer(phi0.values, phi2.values)  # axes (x1, x3, x2)
    d1, d2, d3 = split.d1, split.d2, split.d3
    order = list(range(d1)) + list(range(d1 + d3, d1 + d3 + d2)) + list(range(d1, d1 + d3))
    return np.transpose(outer, order)


def stft_trace_identity_residual(f: SampledField, split: DimSplit, phi0: Window, phi2: Window) -> float:
    """Normalized max gap between ``V_{phi0}(Tr_z f)`` and its phase-space integral form.

    The right-hand side is

        (2pi)^{-d2/2} ||phi2||^{-2} sum_{y,eta} V_phi f(x1,y,x3,xi1,eta,xi3) phi2(z-y) e^{i<z,eta>} h^{d2} dxi^{d2}

    with ``phi = phi0 (x) phi2`` and ``||phi2||`` the window's continuum L^2 norm.
    """
    _check_split(f, split)
    spec = f.spec
    d1, d2 = split.d1, split.d2
    d = split.dim
    n = spec.n
    lhs = stft(trace_map(f, split), phi0).values
    phi = Window(SampledField(spec, _interleave_window(phi0, phi2, split)))
    v = stft(f, phi).values  # axes (x1,x2,x3, xi1,xi2,xi3)
    zi, _ = split.snap(spec)
    # phi2(z - y) over y indices: coordinate index z - y + N/2
    y = np.stack(np.meshgrid(*([np.arange(n)] * d2), indexing="ij"), -1) if d2 else np.zeros((0,))
    kern = phi2.values[tuple(((np.asarray(zi) - y + n // 2) % n)[..., j] for j in range(d2))] if d2 else np.ones(())
    z = np.asarray(split.z)
    eta = np.stack(np.meshgrid(*([spec.freqs()] * d2), indexing="ij"), -1) if d2 else np.zeros((0,))
    phase = np.exp(1j * (eta @ z)) if d2 else np.ones(())
    x2_axes = list(range(d1, d1 + d2))
    xi2_axes = list(range(d + d1, d + d1 + d2))
    v = np.moveaxis(v, x2_axes + xi2_axes, list(range(2 * d2)))
    weights = np.multiply.outer(kern, phase)
    rhs = np.tensordot(weights, v, axes=(list(range(2 * d2)), list(range(2 * d2))))
    rhs *= (2 * math.pi) ** (-d2 / 2) * phi2.l2_norm ** -2 * (spec.step * spec.freq_step) ** d2
    scale = np.max(np.abs(lhs))
    if scale == 0:
        return float(np.max(np.abs(rhs)))
    return float(np.max(np.abs(lhs - rhs)) / scale)


def tensor_extension(f0: SampledField, phi: Window, split: DimSplit) -> SampledField:
    """``f(x1, x2, x3) = f0(x1, x3) phi(x2 - z)``; a right inverse of the trace when ``phi(0) = 1``."""
    spec = f0.spec
    n = spec.n
    if f0.spec.dim != split.d0 or phi.spec.dim != split.d2:
        raise ValueError("dimensions do not match the split")
    origin = phi.values[(n // 2,) * split.d2] if split.d2 else 1.0
    if abs(origin - 1) > 1e-12:
        raise ValueError(f"extension window must satisfy phi(0) = 1, got {origin}")
    zi, _ = split.snap(spec)
    shifted = np.roll(phi.values, tuple(i - n // 2 for i in zi), axis=tuple(range(split.d2)))
    outer = np.multiply.outer(f0.values, shifted)  # axes (x1, x3, x2)
    d1, d2, d3 = split.d1, split.d2, split.d3
    order = list(range(d1)) + list(range(d1 + d3, d1 + d3 + d2)) + list(range(d1, d1 + d3))
    return SampledField(spec.with_dim(split.dim), np.transpose(outer, order))


# ---------------------------------------------------------------- experiment

def lebesgue_r(p: Sequence[float], q: Sequence[float], split: DimSplit) -> float:
    """Largest ``r`` with ``max(1/p0, 1/q1, 1/q2, 1) - 1/q2 <= 1/r``."""
    d1, d2 = split.d1, split.d2
    p0 = list(p[:d1]) + list(p[d1 + d2:])
    q1 = list(q[:d1])
    q2 = list(q[d1:d1 + d2])

    def inv(e):
        return 0.0 if math.isinf(e) else 1.0 / e

    lhs = max([1.0] + [inv(e) for e in p0 + q1 + q2]) - min(inv(e) for e in q2)
    return math.inf if lhs <= 0 else 1.0 / lhs


def sobolev_weights(split: DimSplit, s: float, s0: float = 0.0) -> tuple[Weight, Weight, Weight]:
    """``omega = <(xi2, xi3)>^s``, ``omega0 = <xi3>^{s0}``, ``theta = <(xi2, xi3)>^{-s} <xi3>^{s0}``."""
    d, d0 = split.dim, split.d0
    d1, d2, d3 = split.d1, split.d2, split.d3
    omega = BlockLift(2 * d, (d + d1,), (d2 + d3,), PolyBracket(s))
    omega0 = BlockLift(2 * d0, (d0 + d1,), (d3,), PolyBracket(s0)) if d3 else ONE
    theta_parts = [BlockLift(d2 + d3, (0,), (d2 + d3,), PolyBracket(-s))]
    if d3 and s0:
        theta_parts.append(BlockLift(d2 + d3, (d2,), (d3,), PolyBracket(s0)))
    return omega, omega0, Product(tuple(theta_parts))


@dataclass
class TraceExperimentConfig:
    split: DimSplit = field(default_factory=lambda: DimSplit(1, 1, 0))
    p: tuple[float, ...] = (2.0, 2.0)
    q: tuple[float, ...] = (2.0, 2.0)
    omega: Weight | None = None
    omega0: Weight | None = None
    theta: Weight | None = None
    s: float = 1.0
    s0: float = 0.0
    resolutions: tuple[int, ...] = (16, 32)
    family_random: int = 40
    family_adversarial: int = 10
    seed: int = 0
    strides: tuple[int, int] = (1, 1)
    strict_theta: bool = True

    def weights(self) -> tuple[Weight, Weight, Weight]:
        omega, omega0, theta = sobolev_weights(self.split, self.s, self.s0)
        return (self.omega or omega, self.omega0 or omega0, self.theta or theta)


def _atoms_1d(x: np.ndarray, centers: np.ndarray, freqs: np.ndarray) -> np.ndarray:
    """``e^{-(x-c)^2/2} e^{i x w}`` with shape (centers, freqs, points)."""
    env = np.exp(-0.5 * (x[None, :] - centers[:, None]) ** 2)
    wave = np.exp(1j * freqs[:, None] * x[None, :])
    return env[:, None, :] * wave[None, :, :]


def random_family(spec: GridSpec, count: int, seed: int, radius: int = 2) -> list[SampledField]:
    """Gaussian-atom expansions with coefficients damped by ``e^{-(|x|^2+|xi|^2)/8}``.

    Atoms sit on the unit phase-space lattice ``|x_j|, |xi_j| <= radius`` and are
    evaluated analytically, so the same functions are produced on every grid.
    """
    d = spec.dim
    rng = np.random.default_rng(seed)
    c1 = np.arange(-radius, radius + 1, dtype=float)
    atoms = _atoms_1d(spec.coords(), c1, c1)  # (m, m, N)
    lat = np.meshgrid(*([c1] * (2 * d)), indexing="ij")
    env = np.exp(-sum(t * t for t in lat) / 8)
    out = []
    for _ in range(count):
        coef = (rng.standard_normal(env.shape) + 1j * rng.standard_normal(env.shape)) * env
        out.append(SampledField(spec, _synthesize(coef, atoms, d)))
    return out


def _synthesize(coef: np.ndarray, atoms: np.ndarray, d: int) -> np.ndarray:
    """Sum ``coef[c1..cd, w1..wd] prod_j atoms[cj, wj, x_j]``."""
    centers = "abcd"[:d]
    freqs = "efgh"[:d]
    outs = "pqrs"[:d]
    terms = [f"{centers[j]}{freqs[j]}{outs[j]}" for j in range(d)]
    expr = f"{centers}{freqs}," + ",".join(terms) + f"->{outs}"
    return np.einsum(expr, coef, *([atoms] * d))


def adversarial_family(spec: GridSpec, split: DimSplit, count: int) -> list[SampledField]:
    """Fields narrow in ``x2`` (broad in ``xi2``); odd members carry ``e^{i x2 xi2max/2}``.

    Widths shrink with the grid step, so refinement probes ever higher ``|xi2|``.
    """
    d1, d2 = split.d1, split.d2
    h = spec.step
    xi_max = spec.n * spec.freq_step / 2
    mesh = spec.mesh()
    out = []
    for k in range(count):
        width = h * (1.0 + 0.5 * (k // 2))
        r_other = sum(mesh[j] ** 2 for j in range(split.dim) if not d1 <= j < d1 + d2)
        r2 = sum(mesh[j] ** 2 for j in range(d1, d1 + d2))
        vals = np.exp(-0.5 * r_other) * np.exp(-0.5 * r2 / width ** 2)
        if k % 2:
            vals = vals * np.exp(0.5j * xi_max * sum(mesh[j] for j in range(d1, d1 + d2)))
        out.append(SampledField(spec, np.broadcast_to(vals, spec.shape)))
    return out


def member_ratio(f: SampledField, split: DimSplit, p, q, omega: Weight, omega0: Weight,
                 strides=(1, 1)) -> float:
    """``||Tr_z f||_{M^{p0,q0}_(omega0)} / ||f||_{M^{p,q}_(omega)}``."""
    d1, d2 = split.d1, split.d2
    p0 = tuple(p[:d1]) + tuple(p[d1 + d2:])
    q0 = tuple(q[:d1]) + tuple(q[d1 + d2:])
    spec = f.spec
    win = gaussian_window(spec)
    win0 = gaussian_window(spec.with_dim(split.d0))
    den = modulation_norm(f, win, p, q, omega, "M", strides)
    num = modulation_norm(trace_map(f, split), win0, p0, q0, omega0, "M", strides)
    return num / den if den > 0 else 0.0


def trace_bound_experiment(config: TraceExperimentConfig) -> dict:
    split = config.split
    omega, omega0, theta = config.weights()
    r = lebesgue_r(config.p, config.q, split)
    fine = GridSpec.self_dual(1, max(config.resolutions))
    xi3 = dual_grid(fine).with_dim(split.d3) if split.d3 else None
    theta_report = trace_weight_constant(theta, r, xi3, dual_grid(fine).with_dim(split.d2))
    if not theta_report.finite and config.strict_theta:
        raise InfiniteThetaConstant(f"C_theta lattice sums do not settle: {theta_report.sums}")
    per_res = []
    for n in config.resolutions:
        spec = GridSpec.self_dual(split.dim, n)
        family = random_family(spec, config.family_random, config.seed)
        family += adversarial_family(spec, split, config.family_adversarial)
        ratios = pmap(lambda f: member_ratio(f, split, config.p, config.q, omega, omega0, config.strides),
                      family)
        best = int(np.argmax(ratios))
        per_res.append({"N": n, "R": float(ratios[best]), "argmax": best,
                        "R_random": float(max(ratios[:config.family_random], default=0.0)),
                        "R_adversarial": float(max(ratios[config.family_random:], default=0.0))})
    growth = per_res[-1]["R"] / per_res[0]["R"] if per_res[0]["R"] > 0 else math.inf
    # right-inverse identity on a random trace-side field
    spec0 = GridSpec.self_dual(split.d0, config.resolutions[0])
    rng = np.random.default_rng(config.seed)
    f0 = SampledField(spec0, rng.standard_normal(spec0.shape) + 1j * rng.standard_normal(spec0.shape))
    ext = tensor_extension(f0, gaussian_window(spec0.with_dim(split.d2), peak_one=True), split)
    right_inverse_error = float(np.max(np.abs(trace_map(ext, split).values - f0.values)))
    return {
        "r": r,
        "theta": theta_report.as_dict(),
        "resolutions": per_res,
        "growth": growth,
        "right_inverse_error": right_inverse_error,
    }
