"""Moderate weights as small expression trees, evaluated in log space.

Leaves act on the Euclidean length of whatever coordinate vector they see, so
they are dimension agnostic; :class:`BlockLift` pins an ambient dimension and
routes a coordinate sub-block to its inner weight.

>>> w = Product((PolyBracket(2.0), Reciprocal(PolyBracket(2.0))))
>>> float(eval_weight(w, [3.0, 4.0]))
1.0
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import DimensionMismatch, NonPositiveR
from .lattice import GridSpec

# rows per chunk when evaluating on large product grids
_CHUNK_POINTS = 1 << 20


def _norm(x: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(x * x, axis=-1))


@dataclass(frozen=True)
class PolyBracket:
    """``<x>^s = (1 + |x|^2)^{s/2}``."""

    s: float

    def log_value(self, x):
        return 0.5 * self.s * np.log1p(np.sum(x * x, axis=-1))

    def ambient_dim(self):
        return None


@dataclass(frozen=True)
class SubExp:
    """``exp(r |x|^theta)``; ``r`` may be negative."""

    r: float
    theta: float = 1.0

    def __post_init__(self):
        if not 0 < self.theta <= 1:
            raise ValueError(f"theta must lie in (0, 1], got {self.theta}")

    def log_value(self, x):
        return self.r * _norm(x) ** self.theta

    def ambient_dim(self):
        return None


@dataclass(frozen=True)
class Constant:
    c: float = 1.0

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("constant weight must be positive")

    def log_value(self, x):
        return np.full(np.shape(x)[:-1], math.log(self.c))

    def ambient_dim(self):
        return None


@dataclass(frozen=True)
class BlockLift:
    """Apply ``inner`` to the coordinates ``x[o:o+l]`` for each (offset, length) pair, concatenated."""

    dim: int
    offsets: tuple[int, ...]
    lengths: tuple[int, ...]
    inner: "Weight"

    def __post_init__(self):
        object.__setattr__(self, "offsets", tuple(int(o) for o in self.offsets))
        object.__setattr__(self, "lengths", tuple(int(n) for n in self.lengths))
        if len(self.offsets) != len(self.lengths):
            raise ValueError("offsets and lengths differ in length")
        used: set[int] = set()
        for o, n in zip(self.offsets, self.lengths):
            block = set(range(o, o + n))
            if o < 0 or n < 0 or o + n > self.dim:
                raise DimensionMismatch(f"block [{o}, {o + n}) outside ambient dimension {self.dim}")
            if used & block:
                raise ValueError("BlockLift blocks overlap")
            used |= block
        inner_dim = self.inner.ambient_dim()
        if inner_dim is not None and inner_dim != sum(self.lengths):
            raise DimensionMismatch("inner weight dimension does not match block size")

    @property
    def index(self) -> list[int]:
        return [j for o, n in zip(self.offsets, self.lengths) for j in range(o, o + n)]

    def log_value(self, x):
        return self.inner.log_value(x[..., self.index])

    def ambient_dim(self):
        return self.dim


@dataclass(frozen=True)
class Product:
    factors: tuple["Weight", ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        self.ambient_dim()

    def log_value(self, x):
        out = np.zeros(np.shape(x)[:-1])
        for f in self.factors:
            out = out + f.log_value(x)
        return out

    def ambient_dim(self):
        dims = {f.ambient_dim() for f in self.factors} - {None}
        if len(dims) > 1:
            raise DimensionMismatch(f"product of weights with ambient dimensions {sorted(dims)}")
        return dims.pop() if dims else None


@dataclass(frozen=True)
class Reciprocal:
    inner: "Weight"

    def log_value(self, x):
        return -self.inner.log_value(x)

    def ambient_dim(self):
        return self.inner.ambient_dim()


Weight = Union[PolyBracket, SubExp, Constant, BlockLift, Product, Reciprocal]

ONE = Constant(1.0)


def is_trivial(w: Weight | None) -> bool:
    return w is None or (isinstance(w, Constant) and w.c == 1.0)


def _check_dim(w: Weight, m: int) -> None:
    d = w.ambient_dim()
    if d is not None and d != m:
        raise DimensionMismatch(f"weight expects {d} coordinates, got {m}")


def log_weight(w: Weight, x) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    _check_dim(w, x.shape[-1])
    return w.log_value(x)


def eval_weight(w: Weight, x) -> np.ndarray:
    """Value of ``w`` at point(s) ``x`` (last axis = coordinates)."""
    return np.exp(log_weight(w, x))


def eval_on_grid(w: Weight | None, coords: Sequence[np.ndarray]) -> np.ndarray | float:
    """Evaluate on the product grid ``coords[0] x coords[1] x ...``.

    Returns the scalar 1.0 for trivial weights so callers can skip the multiply.
    """
    if is_trivial(w):
        return 1.0
    m = len(coords)
    _check_dim(w, m)
    shape = tuple(len(c) for c in coords)
    out = np.empty(shape)
    rest = int(np.prod(shape[1:], dtype=np.int64)) if m > 1 else 1
    rows = max(1, _CHUNK_POINTS // max(rest, 1))
    tail = np.meshgrid(*coords[1:], indexing="ij") if m > 1 else []
    tail = [t[None] for t in tail]
    for start in range(0, shape[0], rows):
        head = coords[0][start:start + rows]
        pts = np.empty((len(head),) + shape[1:] + (m,))
        pts[..., 0] = head.reshape((-1,) + (1,) * (m - 1))
        for j, t in enumerate(tail, start=1):
            pts[..., j] = t
        out[start:start + rows] = np.exp(w.log_value(pts))
    return out


# ---------------------------------------------------------------- constructors

def poly_weight(s: float, dim: int | None = None, offset: int = 0, length: int | None = None) -> Weight:
    """``<x_block>^s``; with ``dim`` given, lift to that ambient dimension."""
    w = PolyBracket(s)
    if dim is None:
        return w
    length = dim - offset if length is None else length
    return BlockLift(dim, (offset,), (length,), w)


def omega_r(base: Weight, d: int, r: float) -> Weight:
    """``omega(x) <xi>^{-r}`` on ``R^{2d}``."""
    return Product((BlockLift(2 * d, (0,), (d,), base), BlockLift(2 * d, (d,), (d,), PolyBracket(-r))))


def omega_rs(base: Weight, d: int, r: float, s: float) -> Weight:
    """``omega(x) exp(-r |xi|^{1/s})`` on ``R^{2d}``, ``s >= 1``."""
    if s < 1:
        raise ValueError("s must be >= 1")
    return Product((BlockLift(2 * d, (0,), (d,), base), BlockLift(2 * d, (d,), (d,), SubExp(-r, 1.0 / s))))


# ------------------------------------------------------------ JSON round trip

def to_json(w: Weight) -> dict:
    if isinstance(w, PolyBracket):
        return {"kind": "poly", "s": w.s}
    if isinstance(w, SubExp):
        return {"kind": "subexp", "r": w.r, "theta": w.theta}
    if isinstance(w, Constant):
        return {"kind": "constant", "c": w.c}
    if isinstance(w, BlockLift):
        return {"kind": "block", "dim": w.dim, "offsets": list(w.offsets),
                "lengths": list(w.lengths), "inner": to_json(w.inner)}
    if isinstance(w, Product):
        return {"kind": "product", "factors": [to_json(f) for f in w.factors]}
    if isinstance(w, Reciprocal):
        return {"kind": "reciprocal", "inner": to_json(w.inner)}
    raise TypeError(f"not a weight: {w!r}")


def from_json(doc: dict | None) -> Weight:
    if doc is None:
        return ONE
    kind = doc["kind"]
    if kind == "poly":
        return PolyBracket(float(doc["s"]))
    if kind == "subexp":
        return SubExp(float(doc["r"]), float(doc.get("theta", 1.0)))
    if kind == "constant":
        return Constant(float(doc.get("c", 1.0)))
    if kind == "block":
        return BlockLift(int(doc["dim"]), tuple(doc["offsets"]), tuple(doc["lengths"]), from_json(doc["inner"]))
    if kind == "product":
        return Product(tuple(from_json(f) for f in doc["factors"]))
    if kind == "reciprocal":
        return Reciprocal(from_json(doc["inner"]))
    raise ValueError(f"unknown weight kind {kind!r}")


# ------------------------------------------------------------- diagnostics

def moderateness_ratio(w: Weight, r: float, sample_count: int, box_radius: float, seed: int,
                       dim: int | None = None) -> float:
    """Largest sampled ``w(x+y) / (w(x) e^{r|y|})`` with ``x, y`` uniform in the box.

    The first pair has ``y = 0``, so the result is never below 1.

    A value that stays bounded as ``sample_count`` grows is numerical evidence
    that ``w`` is moderate with respect to ``C e^{r|.|}``.
    """
    if r < 0 or sample_count < 1:
        raise ValueError("need r >= 0 and sample_count >= 1")
    m = w.ambient_dim() or dim or 1
    rng = np.random.default_rng(seed)
    x = rng.uniform(-box_radius, box_radius, size=(sample_count, m))
    y = rng.uniform(-box_radius, box_radius, size=(sample_count, m))
    y[0] = 0.0
    logs = w.log_value(x + y) - w.log_value(x) - r * _norm(y)
    return float(np.exp(np.max(logs)))


def moderateness_sweep(w: Weight, r: float, box_radius: float, points: int = 41) -> float:
    """Deterministic counterpart of :func:`moderateness_ratio` over a 1-D grid of pairs."""
    t = np.linspace(-box_radius, box_radius, points)
    x, y = np.meshgrid(t, t, indexing="ij")
    logs = (w.log_value((x + y)[..., None]) - w.log_value(x[..., None]) - r * np.abs(y))
    return float(np.exp(np.max(logs)))


def submultiplicative_defect(omega: Weight, v: Weight, coords: np.ndarray) -> float:
    """``max omega(x+y) / (omega(x) v(y))`` over all pairs from a 1-D coordinate set.

    ``x + y`` is taken literally (callers pass centered representatives).
    """
    x, y = np.meshgrid(coords, coords, indexing="ij")
    logs = omega.log_value((x + y)[..., None]) - omega.log_value(x[..., None]) - v.log_value(y[..., None])
    return float(np.exp(np.max(logs)))


@dataclass(frozen=True)
class TraceWeightReport:
    c_theta: float
    r_exponent: float
    finite: bool
    sums: tuple[float, ...] = ()

    def as_dict(self) -> dict:
        return {"c_theta": self.c_theta, "r_exponent": self.r_exponent,
                "finite": self.finite, "extension_sums": list(self.sums)}


def _theta_lr(theta: Weight, r: float, xi2: np.ndarray, xi3_points: np.ndarray, d2: int, cell: float) -> float:
    """sup over xi3 of the lattice L^r quasi-norm of theta(., xi3)."""
    grids = np.meshgrid(*([xi2] * d2), indexing="ij") if d2 else []
    xi2_pts = np.stack(grids, axis=-1).reshape(-1, d2) if d2 else np.zeros((1, 0))
    best = 0.0
    for xi3 in xi3_points:
        pts = np.concatenate([xi2_pts, np.broadcast_to(xi3, (len(xi2_pts), len(xi3)))], axis=1)
        vals = np.exp(theta.log_value(pts))
        if math.isinf(r):
            val = float(np.max(vals))
        else:
            val = float((math.fsum((vals ** r).tolist()) * cell) ** (1 / r))
        best = max(best, val)
    return best


def trace_weight_constant(theta: Weight, r: float, xi3_grid: GridSpec | None, xi2_grid: GridSpec,
                          growth_tol: float = 0.05, doublings: int = 2) -> TraceWeightReport:
    """Lattice surrogate of ``sup_{xi3} || theta(., xi3) ||_{L^r}``.

    ``c_theta`` is computed on ``xi2_grid`` (Riemann sum with cell ``step^{d2}``).
    The ``finite`` flag repeats the computation with the xi2 extent doubled
    ``doublings`` times at fixed step and requires the last doubling to change
    the value by less than ``growth_tol``.
    """
    if not r > 0:
        raise NonPositiveR(f"r must be positive, got {r}")
    d2 = xi2_grid.dim
    d3 = 0 if xi3_grid is None else xi3_grid.dim
    _check_dim(theta, d2 + d3)
    if d3:
        xi3_points = xi3_grid.points().reshape(-1, d3)
    else:
        xi3_points = np.zeros((1, 0))
    cell = xi2_grid.step ** d2
    values = []
    for k in range(doublings + 1):
        n = xi2_grid.n * 2 ** k
        xi2 = (np.arange(n) - n // 2) * xi2_grid.step
        values.append(_theta_lr(theta, r, xi2, xi3_points, d2, cell))
    last, prev = values[-1], values[-2] if len(values) > 1 else values[-1]
    finite = math.isfinite(last) and (prev == last or abs(last - prev) < growth_tol * max(abs(prev), 1e-300))
    return TraceWeightReport(values[0], r, bool(finite), tuple(values))
