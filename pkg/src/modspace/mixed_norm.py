"""Weighted mixed quasi-norms, periodic convolution and Young-type checks.

Permutation convention
----------------------
``permutation[j]`` is the image ``sigma(j)`` of original axis ``j`` (0-based).
Norm axis ``k`` consumes original coordinate ``sigma^{-1}(k)``, and axes are
contracted in norm order: first norm axis 0 with exponent ``p[0]``, then norm
axis 1 with ``p[1]``, and so on.  For ``F = [[1, 2], [3, 4]]`` and ``p = (1, inf)``::

    sigma = (0, 1):  sup over columns of column sums  = max(1+3, 2+4) = 6
    sigma = (1, 0):  sup over rows of row sums        = max(1+2, 3+4) = 7

Sequence-space helpers (:func:`discrete_convolution`, :func:`young_check`,
:func:`exp_convolution_check`) index from 0 with wrap-around, so index 0 is the
origin and coordinates are the centered representatives ``spacing * fftfreq(n) * n``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, NonFiniteInput, RankMismatch, ShapeMismatch
from .lattice import SampledField
from .weights import ONE, SubExp, Weight, eval_on_grid, is_trivial

INF = math.inf


@dataclass(frozen=True)
class MixedNormSpec:
    exponents: tuple[float, ...]
    permutation: tuple[int, ...] | None = None
    weight: Weight = ONE
    cell_volume: float | tuple[float, ...] = 1.0

    def __post_init__(self):
        p = tuple(float(e) for e in self.exponents)
        if any(not (e > 0) for e in p):
            raise ValueError(f"exponents must lie in (0, inf], got {p}")
        object.__setattr__(self, "exponents", p)
        m = len(p)
        perm = tuple(range(m)) if self.permutation is None else tuple(int(j) for j in self.permutation)
        if sorted(perm) != list(range(m)):
            raise ValueError(f"{perm} is not a permutation of 0..{m - 1}")
        object.__setattr__(self, "permutation", perm)
        cells = self.cell_volume
        if np.isscalar(cells):
            cells = (float(cells),) * m
        cells = tuple(float(c) for c in cells)
        if len(cells) != m or any(not c > 0 for c in cells):
            raise ValueError("cell_volume must be positive (scalar or one per axis)")
        object.__setattr__(self, "cell_volume", cells)

    @property
    def rank(self) -> int:
        return len(self.exponents)

    @property
    def inverse_permutation(self) -> tuple[int, ...]:
        inv = [0] * self.rank
        for j, k in enumerate(self.permutation):
            inv[k] = j
        return tuple(inv)

    @property
    def r_exponent(self) -> float:
        """``min(1, p_1, ..., p_m)``: the quasi-norm is an r-norm for this r."""
        return min(1.0, *self.exponents)


def _power_sum_axis0(a: np.ndarray, p: float) -> np.ndarray:
    """``(sum_i a_i^p)^{1/p}`` over axis 0 for nonnegative ``a``, scaled and compensated."""
    if math.isinf(p):
        return a.max(axis=0)
    scale = a.max(axis=0)
    safe = np.where(scale > 0, scale, 1.0)
    terms = (a / safe) ** p
    # Neumaier summation in fixed index order: deterministic and cancellation-free
    s = np.zeros(a.shape[1:])
    c = np.zeros(a.shape[1:])
    for t in terms:
        u = s + t
        c += np.where(np.abs(s) >= np.abs(t), (s - u) + t, (t - u) + s)
        s = u
    return np.where(scale > 0, safe * (s + c) ** (1.0 / p), 0.0)


def _grid_coords(F) -> tuple[np.ndarray, list[np.ndarray] | None]:
    if isinstance(F, SampledField):
        return F.values, [F.spec.coords()] * F.spec.dim
    return np.asarray(F), None


def mixed_quasi_norm(F, spec: MixedNormSpec, coords: Sequence[np.ndarray] | None = None) -> float:
    """Nested ``l^p_{sigma,(omega)}`` quasi-norm of an array or :class:`SampledField`.

    ``coords`` supplies one coordinate vector per original axis and is needed
    only for nontrivial weights (sampled fields provide their own).
    """
    values, own = _grid_coords(F)
    if values.ndim != spec.rank:
        raise RankMismatch(f"array rank {values.ndim} != {spec.rank} exponents")
    if not np.all(np.isfinite(values)):
        raise NonFiniteInput("input contains NaN or Inf")
    g = np.abs(values).astype(float)
    if not is_trivial(spec.weight):
        coords = own if coords is None else coords
        if coords is None:
            raise DimensionMismatch("weighted norm of a bare array needs coordinates")
        if [len(c) for c in coords] != list(values.shape):
            raise DimensionMismatch("coordinate vectors do not match array shape")
        g = g * eval_on_grid(spec.weight, coords)
    return _contract(g, spec)


def _contract(g: np.ndarray, spec: MixedNormSpec) -> float:
    inv = spec.inverse_permutation
    g = np.transpose(g, inv)
    for k, p in enumerate(spec.exponents):
        g = _power_sum_axis0(g, p)
        if not math.isinf(p):
            g = g * spec.cell_volume[inv[k]] ** (1.0 / p)
    return float(g)


def weighted_abs_norm(g: np.ndarray, spec: MixedNormSpec) -> float:
    """Contract an already weighted, nonnegative array (skips weight evaluation)."""
    if g.ndim != spec.rank:
        raise RankMismatch(f"array rank {g.ndim} != {spec.rank} exponents")
    return _contract(np.asarray(g, dtype=float), spec)


def modulation_flavor_spec(p: Sequence[float], q: Sequence[float], d: int, flavor: str = "M",
                           weight: Weight = ONE,
                           cell: float | tuple[float, float] = 1.0) -> MixedNormSpec:
    """Spec on the ``2d`` phase-space axes ``(x, xi)``.

    Flavor ``M`` contracts the x-axes with ``p`` first, then the xi-axes with ``q``.
    Flavor ``W`` uses the block swap permutation and exponents ``(q, p)``, so the
    xi-axes go first.  ``cell`` is a scalar or ``(cell_x, cell_xi)``.
    """
    p, q = tuple(p), tuple(q)
    if len(p) != d or len(q) != d:
        raise DimensionMismatch(f"need {d} exponents per block, got {len(p)} and {len(q)}")
    cx, cxi = (cell, cell) if np.isscalar(cell) else cell
    cells = (cx,) * d + (cxi,) * d
    flavor = flavor.upper()
    if flavor == "M":
        return MixedNormSpec(p + q, tuple(range(2 * d)), weight, cells)
    if flavor == "W":
        swap = tuple(j + d for j in range(d)) + tuple(range(d))
        return MixedNormSpec(q + p, swap, weight, cells)
    raise ValueError(f"flavor must be 'M' or 'W', got {flavor!r}")


# ------------------------------------------------------------- convolution

def lattice_coords(n: int, spacing: float = 1.0) -> np.ndarray:
    """Centered representatives of ``Z_n`` (index 0 is the origin), times ``spacing``."""
    return np.fft.fftfreq(n) * n * spacing


def discrete_convolution(f, g) -> np.ndarray:
    """Circular convolution ``(f*g)(n) = sum_m f(m) g(n - m mod N)`` per axis."""
    f = np.asarray(f)
    g = np.asarray(g)
    if f.shape != g.shape:
        raise ShapeMismatch(f"shapes {f.shape} and {g.shape} differ")
    if f.size <= 1024:
        out = np.zeros(f.shape, dtype=np.result_type(f, g, float))
        for m in np.ndindex(f.shape):
            if f[m] != 0:
                out += f[m] * np.roll(g, m, axis=tuple(range(g.ndim)))
        return out
    out = np.fft.ifftn(np.fft.fftn(f) * np.fft.fftn(g))
    if np.isrealobj(f) and np.isrealobj(g):
        return out.real
    return out


def _seq_spec(shape, p) -> MixedNormSpec:
    p = (float(p),) * len(shape) if np.isscalar(p) else tuple(p)
    return MixedNormSpec(p)


def sequence_norm(f, p, weight: Weight = ONE, spacing: float = 1.0) -> float:
    """``l^p_{(omega)}`` norm on ``Z_n^d`` with counting measure and wrapped coordinates."""
    f = np.asarray(f)
    spec = _seq_spec(f.shape, p)
    spec = MixedNormSpec(spec.exponents, None, weight, 1.0)
    coords = [lattice_coords(n, spacing) for n in f.shape]
    return mixed_quasi_norm(f, spec, coords)


def _moderate_on_lattice(omega: Weight, v: Weight, shape, spacing: float) -> float:
    """max omega(x (+) y) / (omega(x) v(y)) over all pairs of the periodic lattice."""
    if is_trivial(omega):
        return 1.0 / float(np.min(eval_on_grid(v, [lattice_coords(n, spacing) for n in shape])))
    idx = np.stack(np.meshgrid(*[np.arange(n) for n in shape], indexing="ij"), -1).reshape(-1, len(shape))
    n = np.array(shape)

    def wrap(i):
        return ((i + n // 2) % n - n // 2) * spacing

    x = wrap(idx)[:, None, :]
    y = wrap(idx)[None, :, :]
    s = wrap(idx[:, None, :] + idx[None, :, :])
    logs = omega.log_value(s) - omega.log_value(x) - v.log_value(y)
    return float(np.exp(np.max(logs)))


def young_check(f1, f2, p, omega: Weight = ONE, v: Weight = ONE, spacing: float = 1.0) -> tuple[float, float]:
    """Both sides of ``||f1*f2||_{l^p_(omega)} <= ||f1||_{l^p_(omega)} ||f2||_{l^r_(v)}``.

    ``r = min(1, p...)``.  Warns when ``omega(x+y) <= omega(x) v(y)`` fails on the lattice.
    """
    f1 = np.asarray(f1)
    f2 = np.asarray(f2)
    ratio = _moderate_on_lattice(omega, v, f1.shape, spacing)
    if ratio > 1 + 1e-12:
        warnings.warn(f"omega is not v-moderate on this lattice (ratio {ratio:.6g})", stacklevel=2)
    pvec = _seq_spec(f1.shape, p).exponents
    r = min(1.0, *pvec)
    lhs = sequence_norm(discrete_convolution(f1, f2), pvec, omega, spacing)
    rhs = sequence_norm(f1, pvec, omega, spacing) * sequence_norm(f2, r, v, spacing)
    return lhs, rhs


@dataclass(frozen=True)
class ExpConvolutionReport:
    lhs: float
    rhs: float
    admissible: bool
    kernel_norms: tuple[float, ...]


def exp_kernel(shape, r: float, spacing: float = 1.0) -> np.ndarray:
    coords = np.meshgrid(*[lattice_coords(n, spacing) for n in shape], indexing="ij")
    return np.exp(-r * np.sqrt(sum(c * c for c in coords)))


def exp_convolution_check(f, p, omega: Weight, r: float, v: Weight | None = None,
                          spacing: float = 1.0, growth_tol: float = 0.05) -> ExpConvolutionReport:
    """Convolution with ``e^{-r|.|}`` against its Young bound.

    ``v`` defaults to ``omega`` (right for the submultiplicative families used
    here).  ``admissible`` requires the kernel's ``l^{min(p,1)}_(v)`` norm to
    change by less than ``growth_tol`` when the lattice extent is doubled.
    """
    if not r > 0:
        raise ValueError("r must be positive")
    v = omega if v is None else v
    f = np.asarray(f)
    pvec = _seq_spec(f.shape, p).exponents
    rmin = min(1.0, *pvec)
    kernel = exp_kernel(f.shape, r, spacing)
    lhs = sequence_norm(discrete_convolution(f, kernel), pvec, omega, spacing)
    norms = []
    for k in range(3):
        shape = tuple(n * 2 ** k for n in f.shape)
        with np.errstate(over="ignore"):
            norms.append(sequence_norm(exp_kernel(shape, r, spacing), rmin, v, spacing))
    c = norms[0]
    last, prev = norms[-1], norms[-2]
    admissible = math.isfinite(last) and abs(last - prev) < growth_tol * prev
    return ExpConvolutionReport(lhs, c * sequence_norm(f, pvec, omega, spacing), bool(admissible), tuple(norms))


def exp_weight(rate: float = 1.0) -> Weight:
    """``e^{rate |x|}``."""
    return SubExp(rate, 1.0)
