"""Discrete STFT, Gabor analysis/synthesis and modulation-space norms.

Conventions (one table for the whole package):

=========================  ==============================================================
STFT                       ``V[n,k] = (2pi)^{-d/2} h^d sum_m f(x_m) conj(phi(x_m - x_n)) e^{-i x_m xi_k}``
time-frequency shift       ``(pi(n,k) g)(x_m) = g(x_m - x_n) e^{i x_m xi_k}`` (periodic shift)
frame operator             ``S = h^d sum_lambda pi(lambda)phi (pi(lambda)phi)^*``
synthesis                  ``f(x_m) = (2pi)^{d/2} sum_lambda c(lambda) (pi(lambda)psi)(x_m)``
phase-space cell           ``(a h)`` per x-axis, ``(b dxi)`` per xi-axis
=========================  ==============================================================

With ``psi = S^{-1} phi`` (canonical dual) synthesis inverts analysis exactly.
Sub-lattice indices are those congruent to ``N/2`` modulo the stride, so the
origin always belongs to the lattice.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import GridMismatch, NotAFrame, ShapeMismatch
from .lattice import GridSpec, OperatorMatrix, SampledField, fourier, inverse_fourier
from .mixed_norm import modulation_flavor_spec, weighted_abs_norm
from .weights import ONE, Weight, eval_on_grid, is_trivial

# shifts processed per FFT batch; bounds the temporary to about 64 MB
_BATCH_VALUES = 1 << 22


@dataclass(frozen=True, eq=False)
class Window:
    field: SampledField
    kind: str = "custom"
    l2_norm: float = field(default=float("nan"))

    def __post_init__(self):
        if math.isnan(self.l2_norm):
            object.__setattr__(self, "l2_norm", self.field.l2_norm())
        if not self.l2_norm > 0:
            raise ValueError("window must be nonzero")

    @property
    def spec(self) -> GridSpec:
        return self.field.spec

    @property
    def values(self) -> np.ndarray:
        return self.field.values

    @property
    def grid_norm(self) -> float:
        return self.field.l2_norm()


def gaussian_window(spec: GridSpec, peak_one: bool = False) -> Window:
    """``pi^{-d/4} e^{-|x|^2/2}`` (unit L^2 norm), or ``e^{-|x|^2/2}`` when ``peak_one``.

    ``l2_norm`` is the exact continuum norm, not the grid sum.
    """
    d = spec.dim
    r2 = sum(c * c for c in spec.mesh()) if d else np.zeros(())
    vals = np.exp(-0.5 * r2)
    if peak_one:
        return Window(SampledField(spec, vals), "gaussian", math.pi ** (d / 4))
    return Window(SampledField(spec, math.pi ** (-d / 4) * vals), "gaussian", 1.0)


def tensor_window(*windows: Window) -> Window:
    """Tensor product on the concatenated axes, in the order given."""
    spec = windows[0].spec
    vals = np.ones(())
    norm = 1.0
    kind = "gaussian" if all(w.kind == "gaussian" for w in windows) else "custom"
    for w in windows:
        if w.spec.n != spec.n or w.spec.step != spec.step:
            raise GridMismatch("tensor factors must share N and h")
        vals = np.multiply.outer(vals, w.values)
        norm *= w.l2_norm
    dim = sum(w.spec.dim for w in windows)
    out_spec = spec.with_dim(dim)
    if kind == "custom":
        return Window(SampledField(out_spec, vals))
    return Window(SampledField(out_spec, vals), kind, norm)


@dataclass(frozen=True, eq=False)
class PhaseSpaceArray:
    """Coefficients on the (sub-)lattice; axes are ``(x_1..x_d, xi_1..xi_d)``."""

    values: np.ndarray
    grid: GridSpec
    sub_strides: tuple[int, int] = (1, 1)

    def __post_init__(self):
        a, b = self.sub_strides
        n, d = self.grid.n, self.grid.dim
        expect = (n // a,) * d + (n // b,) * d
        if self.values.shape != expect:
            raise ShapeMismatch(f"expected coefficient shape {expect}, got {self.values.shape}")

    def x_coords(self) -> np.ndarray:
        return self.grid.coords()[lattice_indices(self.grid.n, self.sub_strides[0])]

    def xi_coords(self) -> np.ndarray:
        return self.grid.freqs()[lattice_indices(self.grid.n, self.sub_strides[1])]

    def cells(self) -> tuple[float, float]:
        a, b = self.sub_strides
        return a * self.grid.step, b * self.grid.freq_step


def lattice_indices(n: int, stride: int) -> np.ndarray:
    if n % stride:
        raise ValueError(f"stride {stride} does not divide N={n}")
    return np.arange((n // 2) % stride, n, stride)


def _check_same_grid(a: GridSpec, b: GridSpec) -> None:
    if a.dim != b.dim or a.n != b.n or a.step != b.step:
        raise GridMismatch(f"grid mismatch: {a} vs {b}")


def _shift_indices(spec: GridSpec, a: int) -> np.ndarray:
    """Multi-indices of the translation sub-lattice, shape (S, d)."""
    idx = lattice_indices(spec.n, a)
    return np.stack(np.meshgrid(*([idx] * spec.dim), indexing="ij"), -1).reshape(-1, spec.dim)


def stft(f: SampledField, window: Window, strides: tuple[int, int] = (1, 1)) -> PhaseSpaceArray:
    """Short-time Fourier transform on the sub-lattice given by ``strides``.

    One FFT per translation; translations are batched to bound memory.
    """
    spec = f.spec
    _check_same_grid(spec, window.spec)
    a, b = strides
    d, n = spec.dim, spec.n
    shifts = _shift_indices(spec, a)
    kidx = lattice_indices(n, b)
    conj_phi = np.conj(window.values)
    axes = tuple(range(1, d + 1))
    out = np.empty((len(shifts),) + (len(kidx),) * d, dtype=complex)
    batch = max(1, _BATCH_VALUES // spec.size)
    for start in range(0, len(shifts), batch):
        block = shifts[start:start + batch]
        prod = np.empty((len(block),) + spec.shape, dtype=complex)
        for i, s in enumerate(block):
            prod[i] = f.values * np.roll(conj_phi, tuple(s - n // 2), axis=tuple(range(d)))
        spectrum = fourier(prod, spec, axes)
        if b > 1:
            spectrum = spectrum[(slice(None),) + np.ix_(*([kidx] * d))]
        out[start:start + batch] = spectrum
    return PhaseSpaceArray(out.reshape((n // a,) * d + (len(kidx),) * d), spec, (a, b))


@dataclass(frozen=True, eq=False)
class GaborSystem:
    grid: GridSpec
    a_step: int
    b_step: int
    window: Window
    dual: Window | None = None

    def __post_init__(self):
        n = self.grid.n
        if n % self.a_step or n % self.b_step:
            raise ValueError("strides must divide N")
        if self.a_step * self.b_step > n:
            raise NotAFrame(f"a*b = {self.a_step * self.b_step} exceeds N = {n}")
        _check_same_grid(self.grid, self.window.spec)

    @property
    def strides(self) -> tuple[int, int]:
        return self.a_step, self.b_step

    @property
    def lattice_size(self) -> int:
        n, d = self.grid.n, self.grid.dim
        return (n // self.a_step) ** d * (n // self.b_step) ** d

    def with_dual(self) -> "GaborSystem":
        return GaborSystem(self.grid, self.a_step, self.b_step, self.window, dual_window(self))


def gabor_coefficients(f: SampledField, system: GaborSystem) -> PhaseSpaceArray:
    _check_same_grid(f.spec, system.grid)
    return stft(f, system.window, system.strides)


def atom_matrix(system: GaborSystem, window: Window | None = None) -> np.ndarray:
    """Columns ``pi(lambda) g`` for every lattice point, in coefficient flattening order."""
    g = system.window if window is None else window
    spec = system.grid
    d, n = spec.dim, spec.n
    shifts = _shift_indices(spec, system.a_step)
    kidx = lattice_indices(n, system.b_step)
    freqs = spec.freqs()[kidx]
    xs = spec.points().reshape(-1, d) if d else np.zeros((1, 0))
    kgrid = np.stack(np.meshgrid(*([freqs] * d), indexing="ij"), -1).reshape(-1, d)
    mods = np.exp(1j * xs @ kgrid.T)  # (grid points, frequencies)
    cols = []
    for s in shifts:
        shifted = np.roll(g.values, tuple(s - n // 2), axis=tuple(range(d))).reshape(-1)
        cols.append(shifted[:, None] * mods)
    return np.concatenate(cols, axis=1)


def analysis_matrix(system: GaborSystem) -> np.ndarray:
    """``C`` with ``C @ f.ravel() == gabor_coefficients(f).values.ravel()``."""
    spec = system.grid
    d = spec.dim
    return (2 * math.pi) ** (-d / 2) * spec.step ** d * atom_matrix(system).conj().T


def synthesis_matrix(system: GaborSystem, window: Window) -> np.ndarray:
    return (2 * math.pi) ** (system.grid.dim / 2) * atom_matrix(system, window)


def frame_operator(system: GaborSystem) -> OperatorMatrix:
    g = atom_matrix(system)
    s = system.grid.step ** system.grid.dim * (g @ g.conj().T)
    return OperatorMatrix(s, system.grid, system.grid, "frame operator")


def frame_bounds(system: GaborSystem) -> tuple[float, float]:
    ev = np.linalg.eigvalsh(frame_operator(system).entries)
    return float(ev[0]), float(ev[-1])


def dual_window(system: GaborSystem, max_condition: float = 1e8) -> Window:
    """Canonical dual ``S^{-1} phi`` by a dense solve."""
    s = frame_operator(system).entries
    ev = np.linalg.eigvalsh(s)
    if ev[0] <= 0 or ev[-1] / ev[0] > max_condition:
        raise NotAFrame(f"frame operator is singular or ill-conditioned (bounds {ev[0]:.3g}, {ev[-1]:.3g})")
    gamma = np.linalg.solve(s, system.window.values.reshape(-1))
    return Window(SampledField(system.grid, gamma.reshape(system.grid.shape)))


def gabor_synthesis(c: PhaseSpaceArray, window: Window) -> SampledField:
    """``(2pi)^{d/2} sum_lambda c(lambda) e^{i x xi_k} psi(x - x_n)``."""
    spec = c.grid
    _check_same_grid(spec, window.spec)
    a, b = c.sub_strides
    d, n = spec.dim, spec.n
    shifts = _shift_indices(spec, a)
    kidx = lattice_indices(n, b)
    coeff = c.values.reshape((len(shifts),) + (len(kidx),) * d)
    full = np.zeros((len(shifts),) + spec.shape, dtype=complex)
    full[(slice(None),) + np.ix_(*([kidx] * d))] = coeff
    axes = tuple(range(1, d + 1))
    # sum_k c_k e^{i x xi_k} == inverse_fourier(c) * (2pi)^{d/2} / dxi^d
    waves = inverse_fourier(full, spec, axes) * ((2 * math.pi) ** (d / 2) / spec.freq_step ** d)
    out = np.zeros(spec.shape, dtype=complex)
    for i, s in enumerate(shifts):
        out += waves[i] * np.roll(window.values, tuple(s - n // 2), axis=tuple(range(d)))
    return SampledField(spec, (2 * math.pi) ** (d / 2) * out)


def phase_space_norm(c: PhaseSpaceArray, p: Sequence[float], q: Sequence[float], weight: Weight = ONE,
                     flavor: str = "M", unit_cells: bool = False) -> float:
    """Mixed quasi-norm of coefficients; ``unit_cells`` switches to counting measure."""
    d = c.grid.dim
    cell = 1.0 if unit_cells else c.cells()
    spec = modulation_flavor_spec(tuple(p), tuple(q), d, flavor, weight, cell)
    g = np.abs(c.values)
    if not is_trivial(weight):
        g = g * eval_on_grid(weight, [c.x_coords()] * d + [c.xi_coords()] * d)
    return weighted_abs_norm(g, spec)


def _expand(p, d: int) -> tuple[float, ...]:
    return (float(p),) * d if np.isscalar(p) else tuple(float(e) for e in p)


def modulation_norm(f: SampledField, window: Window, p, q, weight: Weight = ONE, flavor: str = "M",
                    strides: tuple[int, int] = (1, 1), unit_cells: bool = False) -> float:
    """``||f||_{M^{p,q}_(omega)}`` (flavor M) or ``||f||_{W^{p,q}_(omega)}`` (flavor W)."""
    d = f.spec.dim
    c = stft(f, window, strides)
    return phase_space_norm(c, _expand(p, d), _expand(q, d), weight, flavor, unit_cells)


def window_decay(window: Window, rate: float) -> float:
    """``max |V_phi phi(x, xi)| e^{rate (|x| + |xi|)}`` over the full grid."""
    v = stft(window.field, window)
    spec = window.spec
    d = spec.dim
    x = spec.coords()
    xi = spec.freqs()
    mesh = np.meshgrid(*([x] * d + [xi] * d), indexing="ij")
    rx = np.sqrt(sum(m * m for m in mesh[:d]))
    rxi = np.sqrt(sum(m * m for m in mesh[d:]))
    return float(np.max(np.abs(v.values) * np.exp(rate * (rx + rxi))))
