"""Periodized uniform grids and their frequency duals.

Every axis of a :class:`GridSpec` carries ``N`` samples at
``x_n = (n - N/2) * h``; the dual grid carries ``xi_k = (k - N/2) * dxi`` with
``dxi = 2*pi / (N*h)``.  Index ``N/2`` is the origin on both sides.

The continuum Fourier transform

    F f(xi) = (2 pi)^{-d/2} \\int f(x) exp(-i <x, xi>) dx

is discretized by :func:`fourier` as ``(2 pi)^{-d/2} h^d sum_n f(x_n) e^{-i x_n xi_k}``,
and :func:`inverse_fourier` is its exact inverse on the grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import MismatchedGrid, NonFiniteInput, ShapeMismatch


@dataclass(frozen=True)
class GridSpec:
    dim: int
    n: int
    step: float
    # exact step of the grid this one is dual to; lets dual_grid round-trip bitwise
    _pair_step: float | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.dim < 0:
            raise ValueError(f"dim must be >= 0, got {self.dim}")
        if self.n < 4 or self.n % 2:
            raise ValueError(f"N must be even and >= 4, got {self.n}")
        if not (self.step > 0 and math.isfinite(self.step)):
            raise ValueError(f"step must be positive, got {self.step}")

    @classmethod
    def self_dual(cls, dim: int, n: int) -> "GridSpec":
        """Grid with ``h = sqrt(2 pi / N)`` so space and frequency extents agree."""
        return cls(dim, n, math.sqrt(2 * math.pi / n))

    @property
    def freq_step(self) -> float:
        if self._pair_step is not None:
            return self._pair_step
        return 2 * math.pi / (self.n * self.step)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def size(self) -> int:
        return self.n ** self.dim

    @property
    def cell_volume(self) -> float:
        return self.step ** self.dim

    @property
    def extent(self) -> float:
        """Half-width ``N h / 2`` of the periodic box."""
        return self.n * self.step / 2

    def coords(self) -> np.ndarray:
        """1-D coordinate vector shared by all axes."""
        return (np.arange(self.n) - self.n // 2) * self.step

    def freqs(self) -> np.ndarray:
        return (np.arange(self.n) - self.n // 2) * self.freq_step

    def index_of(self, x) -> np.ndarray:
        """Nearest grid index (per axis) of coordinate(s) ``x``; no wrapping."""
        return np.rint(np.asarray(x, dtype=float) / self.step).astype(int) + self.n // 2

    def coord_of(self, index) -> np.ndarray:
        return (np.asarray(index) - self.n // 2) * self.step

    def mesh(self) -> list[np.ndarray]:
        """Broadcastable coordinate arrays, one per axis."""
        c = self.coords()
        out = []
        for j in range(self.dim):
            shape = [1] * self.dim
            shape[j] = self.n
            out.append(c.reshape(shape))
        return out

    def points(self) -> np.ndarray:
        """All grid points as an array of shape ``(N,)*dim + (dim,)``."""
        return np.stack(np.meshgrid(*([self.coords()] * self.dim), indexing="ij"), axis=-1)

    def with_dim(self, dim: int) -> "GridSpec":
        return GridSpec(dim, self.n, self.step, self._pair_step)


def dual_grid(spec: GridSpec) -> GridSpec:
    return GridSpec(spec.dim, spec.n, spec.freq_step, spec.step)


def product_grid(a: GridSpec, b: GridSpec) -> GridSpec:
    if a.n != b.n or a.step != b.step:
        raise MismatchedGrid(f"cannot combine (N={a.n}, h={a.step}) with (N={b.n}, h={b.step})")
    return GridSpec(a.dim + b.dim, a.n, a.step, a._pair_step)


@dataclass(frozen=True, eq=False)
class SampledField:
    """Complex samples on ``spec``; axis ``j`` of ``values`` indexes coordinate ``x_j``."""

    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != self.spec.shape:
            raise ShapeMismatch(f"expected shape {self.spec.shape}, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise NonFiniteInput("field contains NaN or Inf")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, spec: GridSpec, fn) -> "SampledField":
        """Sample ``fn(*mesh)`` on the grid (``fn`` receives one array per axis)."""
        vals = np.broadcast_to(fn(*spec.mesh()), spec.shape)
        return cls(spec, np.array(vals, dtype=complex))

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.spec.cell_volume))

    def __add__(self, other: "SampledField") -> "SampledField":
        if other.spec != self.spec:
            raise MismatchedGrid("fields live on different grids")
        return SampledField(self.spec, self.values + other.values)

    def __mul__(self, c) -> "SampledField":
        return SampledField(self.spec, self.values * c)

    __rmul__ = __mul__


def wrap_centered(t, period: float) -> np.ndarray:
    """Representative of ``t`` modulo ``period`` in ``[-period/2, period/2)``."""
    t = np.asarray(t, dtype=float)
    return t - period * np.floor(t / period + 0.5)


def fourier(values: np.ndarray, spec: GridSpec, axes: Sequence[int]) -> np.ndarray:
    """Centered, continuum-normalized DFT over ``axes`` (all on ``spec``'s 1-D grid)."""
    axes = tuple(axes)
    k = len(axes)
    out = np.fft.fftshift(np.fft.fftn(np.fft.ifftshift(values, axes=axes), axes=axes), axes=axes)
    return out * ((2 * math.pi) ** (-k / 2) * spec.step ** k)


def inverse_fourier(values: np.ndarray, spec: GridSpec, axes: Sequence[int]) -> np.ndarray:
    """Inverse of :func:`fourier`; ``spec`` is the *spatial* grid."""
    axes = tuple(axes)
    k = len(axes)
    out = np.fft.fftshift(np.fft.ifftn(np.fft.ifftshift(values, axes=axes), axes=axes), axes=axes)
    return out * ((2 * math.pi) ** (-k / 2) * (spec.freq_step * spec.n) ** k)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense matrix of a discretized operator acting on flattened grid samples.

    ``domain``/``codomain`` are ``None`` when the matrix acts in Gabor-coefficient
    coordinates rather than on grid samples.
    """

    entries: np.ndarray
    domain: GridSpec | None
    codomain: GridSpec | None
    provenance: str = ""

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2:
            raise ShapeMismatch("operator matrix must be 2-D")
        rows = m.shape[0] if self.codomain is None else self.codomain.size
        cols = m.shape[1] if self.domain is None else self.domain.size
        if m.shape != (rows, cols):
            raise ShapeMismatch(f"matrix shape {m.shape} does not match grids")
        if not np.all(np.isfinite(m)):
            raise NonFiniteInput("operator matrix contains NaN or Inf")
        object.__setattr__(self, "entries", m)

    def apply(self, f: SampledField) -> SampledField:
        if f.spec != self.domain:
            raise MismatchedGrid("field is not on the operator's domain grid")
        out = self.entries @ f.values.reshape(-1)
        return SampledField(self.codomain, out.reshape(self.codomain.shape))
