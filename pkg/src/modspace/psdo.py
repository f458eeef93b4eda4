"""Quantizations, amplitude operators and the amplitude -> symbol reduction.

Phase-space fields store the *spatial* :class:`GridSpec` (``N``, ``h``) with
``2d`` or ``3d`` axes.  Axes in the spatial role (``x``, ``y``) are sampled at
``(n - N/2) h``; axes in the frequency role (``xi``, ``zeta``) at
``(k - N/2) dxi``.  Symbols use axis order ``(x, xi)``; amplitudes ``(x, y, zeta)``.

Operator matrices act on sample vectors: ``(Op f)(x_m) = sum_n M[m, n] f(x_n)``.
All quantizations share one discrete kernel rule

    M[m, n] = N^{-d} sum_k a(x_m - t w, zeta_k) e^{i w zeta_k},   w = wrap(x_m - x_n)

with ``wrap`` the centered representative modulo ``N h``.  For ``t = 1/2`` the
symbol is evaluated on the half-step grid by trigonometric interpolation in ``x``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import BlockMismatch, GridMismatch, MemoryGuard, UnsupportedA
from .gabor import Window, gaussian_window, lattice_indices, modulation_norm, stft
from .lattice import GridSpec, OperatorMatrix, SampledField
from .mixed_norm import MixedNormSpec, weighted_abs_norm
from .runtime import pmap
from .weights import ONE, Weight, eval_on_grid, is_trivial

SUPPORTED_T = (0.0, 0.5, 1.0)

# 16^6 complex coefficients (about 268 MB)
DEFAULT_MEMORY_CAP = 16 ** 6


@dataclass(frozen=True)
class QuantizationMatrix:
    """``A = t I``; only Kohn-Nirenberg (0), Weyl (1/2) and right (1) quantizations."""

    t: float = 0.0

    def __post_init__(self):
        if float(self.t) not in SUPPORTED_T:
            raise UnsupportedA(f"A = {self.t} I is not supported; use t in {SUPPORTED_T}")
        object.__setattr__(self, "t", float(self.t))


def _as_t(A) -> float:
    return A.t if isinstance(A, QuantizationMatrix) else QuantizationMatrix(A).t


def _spatial(spec: GridSpec, d: int) -> GridSpec:
    return spec.with_dim(d)


def _centered_ifft(values: np.ndarray, axes) -> np.ndarray:
    """``N^{-k} sum_k v_k e^{+i x_j xi_k}`` on centered grids."""
    return np.fft.fftshift(np.fft.ifftn(np.fft.ifftshift(values, axes=axes), axes=axes), axes=axes)


def _centered_fft(values: np.ndarray, axes) -> np.ndarray:
    return np.fft.fftshift(np.fft.fftn(np.fft.ifftshift(values, axes=axes), axes=axes), axes=axes)


def _refine_half(a: np.ndarray, axes: Sequence[int], n: int) -> np.ndarray:
    """Trigonometric interpolation onto the grid of step ``h/2`` (``2N`` points per axis).

    Centered frequencies ``-N/2 .. N/2-1`` are kept as they are (no Nyquist
    splitting), which matches the multiplier convention of :func:`exp_multiplier`.
    """
    spec_hat = _centered_fft(a, axes) / n ** len(axes)
    pad = [(0, 0)] * a.ndim
    for ax in axes:
        pad[ax] = (n // 2, n // 2)
    padded = np.pad(spec_hat, pad)
    return _centered_ifft(padded, axes) * (2 * n) ** len(axes)


def _pair_indices(n: int, d: int) -> tuple[np.ndarray, np.ndarray]:
    """Row and column multi-indices for an ``N^d x N^d`` matrix, each shaped (d, N^d, N^d)."""
    idx = np.stack(np.meshgrid(*([np.arange(n)] * d), indexing="ij"), 0).reshape(d, -1)
    return idx[:, :, None], idx[:, None, :]


def op_from_symbol(a0: SampledField, A=0.0) -> OperatorMatrix:
    """Matrix of ``Op_{tI}(a0)`` for ``a0`` on axes ``(x, xi)``."""
    t = _as_t(A)
    spec2 = a0.spec
    if spec2.dim % 2:
        raise GridMismatch("symbol needs an even number of axes")
    d = spec2.dim // 2
    n = spec2.n
    xi_axes = tuple(range(d, 2 * d))
    a = a0.values
    m_idx, n_idx = _pair_indices(n, d)
    j = (m_idx - n_idx + n // 2) % n  # index of w = wrap(x_m - x_n)
    if t == 0.5:
        a = _refine_half(a, tuple(range(d)), n)
        s = (2 * (m_idx - n // 2) - (j - n // 2) + n) % (2 * n)
    elif t == 1.0:
        s = (m_idx - (j - n // 2)) % n
    else:
        s = np.broadcast_to(m_idx, j.shape)
    g = _centered_ifft(a, xi_axes)  # (s-axes, w-axes)
    entries = g[tuple(s) + tuple(j)]
    spec = _spatial(spec2, d)
    return OperatorMatrix(entries, spec, spec, f"symbol t={t}")


def op_from_amplitude(a: SampledField) -> OperatorMatrix:
    """``M[m, n] = N^{-d} sum_k a(x_m, x_n, zeta_k) e^{i (x_m - x_n) zeta_k}``."""
    spec3 = a.spec
    if spec3.dim % 3:
        raise GridMismatch("amplitude needs 3d axes")
    d = spec3.dim // 3
    n = spec3.n
    spec = _spatial(spec3, d)
    size = spec.size
    x = spec.points().reshape(size, d)
    zeta = np.stack(np.meshgrid(*([spec.freqs()] * d), indexing="ij"), -1).reshape(size, d)
    e = np.exp(1j * x @ zeta.T)
    vals = a.values.reshape(size, size, size)
    entries = np.einsum("mnk,mk,nk->mn", vals, e, e.conj()) / n ** d
    return OperatorMatrix(entries, spec, spec, "amplitude")


def exp_multiplier(u: SampledField, first: Sequence[int], second: Sequence[int], sign: int = 1,
                   scale: float = 1.0, roles: Sequence[str] | None = None) -> SampledField:
    """Fourier multiplier ``e^{i sign scale <D_second, D_first>}`` across two axis blocks.

    ``roles`` names each axis ``'x'`` (spatial step) or ``'f'`` (frequency step);
    by default ``first`` is spatial and ``second`` frequency.  The multiplier is
    evaluated at centered dual coordinates, so plane waves on the grid are
    eigenvectors with eigenvalue ``e^{i sign scale <c, b>}``.
    """
    first, second = tuple(first), tuple(second)
    if len(first) != len(second):
        raise BlockMismatch(f"blocks of sizes {len(first)} and {len(second)}")
    if set(first) & set(second):
        raise BlockMismatch("blocks overlap")
    spec = u.spec
    n = spec.n
    if roles is None:
        roles = ["x"] * spec.dim
        for ax in second:
            roles[ax] = "f"
    step = {"x": spec.step, "f": spec.freq_step}

    def dual(ax):
        return (np.arange(n) - n // 2) * (2 * math.pi / (n * step[roles[ax]]))

    axes = first + second
    hat = _centered_fft(u.values, axes)
    phase = np.zeros([1] * spec.dim)
    for a1, a2 in zip(first, second):
        shape1 = [1] * spec.dim
        shape1[a1] = n
        shape2 = [1] * spec.dim
        shape2[a2] = n
        phase = phase + dual(a1).reshape(shape1) * dual(a2).reshape(shape2)
    hat = hat * np.exp(1j * sign * scale * phase)
    return SampledField(spec, _centered_ifft(hat, axes))


def calculus_transfer(a1: SampledField, A1=0.0, A2=0.0) -> SampledField:
    """Symbol ``a2`` with ``Op_{A2}(a2) == Op_{A1}(a1)``."""
    t1, t2 = _as_t(A1), _as_t(A2)
    if t1 == t2:
        return a1
    d = a1.spec.dim // 2
    return exp_multiplier(a1, range(d), range(d, 2 * d), +1, t1 - t2)


def shear(a: SampledField) -> SampledField:
    """``(T_1 a)(x, y, zeta) = a(x, x + y, zeta)`` by circular index shift."""
    d = a.spec.dim // 3
    n = a.spec.n
    idx = np.indices(a.spec.shape, sparse=True)
    src = list(idx)
    for j in range(d):
        src[d + j] = (idx[j] + idx[d + j] - n // 2) % n
    return SampledField(a.spec, a.values[tuple(src)])


def unshear(b: SampledField) -> SampledField:
    d = b.spec.dim // 3
    n = b.spec.n
    idx = np.indices(b.spec.shape, sparse=True)
    src = list(idx)
    for j in range(d):
        src[d + j] = (idx[d + j] - idx[j] + n // 2) % n
    return SampledField(b.spec, b.values[tuple(src)])


def reduce_amplitude(a: SampledField) -> SampledField:
    """Kohn-Nirenberg symbol ``a0`` with ``Op_0(a0) == Op(a)``: trace at y=0 of ``e^{i<D_zeta, D_y>} T_1 a``."""
    spec3 = a.spec
    if spec3.dim % 3:
        raise GridMismatch("amplitude needs 3d axes")
    d = spec3.dim // 3
    n = spec3.n
    b = exp_multiplier(shear(a), range(d, 2 * d), range(2 * d, 3 * d), +1, 1.0)
    sl = (slice(None),) * d + (n // 2,) * d + (slice(None),) * d
    return SampledField(spec3.with_dim(2 * d), b.values[sl])


def extend_symbol(a0: SampledField, phi: Window) -> SampledField:
    """Amplitude ``e^{-i<D_zeta, D_y>} (a0(x, zeta) phi(y - x))`` reducing back to ``a0``."""
    spec2 = a0.spec
    d = spec2.dim // 2
    n = spec2.n
    if phi.spec.dim != d or phi.spec.n != n or phi.spec.step != spec2.step:
        raise GridMismatch("extension window must live on the d-dimensional spatial grid")
    if abs(phi.values[(n // 2,) * d] - 1) > 1e-12:
        raise ValueError("extension window must satisfy phi(0) = 1")
    # phi(y - x) as an array over (x, y): c(x, y) = phi[y - x + N/2]
    idx = np.indices((n,) * (2 * d), sparse=True)
    diff = tuple((idx[d + j] - idx[j] + n // 2) % n for j in range(d))
    kernel = phi.values[diff]  # axes (x, y)
    vals = a0.values.reshape((n,) * d + (1,) * d + (n,) * d) * kernel.reshape((n,) * (2 * d) + (1,) * d)
    c = SampledField(spec2.with_dim(3 * d), vals)
    return exp_multiplier(c, range(d, 2 * d), range(2 * d, 3 * d), -1, 1.0)


# ------------------------------------------------------------ amplitude norms

def _require_self_dual(spec: GridSpec) -> None:
    if not math.isclose(spec.step, spec.freq_step, rel_tol=1e-12):
        raise GridMismatch("amplitude norms need a self-dual grid (h == dxi)")


def amplitude_mod_norm(a: SampledField, window: Window | None = None, p=(2.0, 2.0, 2.0), q=(1.0, 1.0, 1.0),
                       weight: Weight = ONE, flavor: str = "M", strides: tuple[int, int] = (1, 1),
                       memory_cap: int = DEFAULT_MEMORY_CAP) -> float:
    """``||a||`` in the sheared modulation space on ``R^{3d}`` (flavors ``M`` and ``W``).

    The STFT is taken on the ``3d`` amplitude grid (axes ``x, y, zeta``), multiplied by
    ``weight`` at the original coordinates, sheared ``y -> x + y`` and contracted with
    exponents ``(p1, p2, p3, q1, q2, q3)`` (flavor M) or frequency block first with
    ``(q, p)`` (flavor W).
    """
    spec = a.spec
    if spec.dim % 3:
        raise GridMismatch("amplitude needs 3d axes")
    _require_self_dual(spec)
    d = spec.dim // 3
    sa, sb = strides
    count = (spec.n // sa) ** spec.dim * (spec.n // sb) ** spec.dim
    if count > memory_cap:
        raise MemoryGuard(f"{count} coefficients exceed the cap of {memory_cap}")
    window = gaussian_window(spec) if window is None else window
    p = _block_exponents(p, d)
    q = _block_exponents(q, d)
    if not np.any(a.values):
        return 0.0
    v = stft(a, window, strides)
    g = np.abs(v.values)
    del v
    if not is_trivial(weight):
        xs = spec.coords()[lattice_indices(spec.n, sa)]
        fs = spec.freqs()[lattice_indices(spec.n, sb)]
        g *= eval_on_grid(weight, [xs] * spec.dim + [fs] * spec.dim)
    g = _shear_coefficients(g, spec.n // sa, (spec.n // 2 - (spec.n // 2) % sa) // sa, d)
    cells = (sa * spec.step,) * (3 * d) + (sb * spec.freq_step,) * (3 * d)
    if flavor.upper() == "M":
        mspec = MixedNormSpec(p + q, None, ONE, cells)
    elif flavor.upper() == "W":
        swap = tuple(range(3 * d, 6 * d)) + tuple(range(3 * d))
        mspec = MixedNormSpec(q + p, swap, ONE, cells)
    else:
        raise ValueError(f"flavor must be 'M' or 'W', got {flavor!r}")
    return weighted_abs_norm(g, mspec)


def _block_exponents(p, d: int) -> tuple[float, ...]:
    p = tuple(float(e) for e in p)
    if len(p) == 3 and d > 1:
        p = tuple(e for e in p for _ in range(d))
    if len(p) != 3 * d:
        raise ValueError(f"need 3 or {3 * d} exponents, got {len(p)}")
    return p


def _shear_coefficients(g: np.ndarray, m: int, origin: int, d: int) -> np.ndarray:
    """``G(x, y, ...) = g(x, x + y, ...)`` on a sub-lattice with ``m`` points per axis."""
    for j in range(d):
        g = np.moveaxis(g, (j, d + j), (0, 1))
        out = np.empty_like(g)
        for i in range(m):
            out[i] = np.roll(g[i], -(i - origin), axis=0)
        g = np.moveaxis(out, (0, 1), (j, d + j))
    return g


# ------------------------------------------------------------ experiments

def gaussian_symbol(spec2: GridSpec, center=(0.0, 0.0), width: float = 1.0, freq=(0.0, 0.0),
                    poly: int = 0) -> SampledField:
    """``x^poly e^{-(|x-x0|^2 + |xi-xi0|^2) / (2 width^2)} e^{i(w1 x + w2 xi)}`` on axes (x, xi), d = 1."""
    if spec2.dim != 2:
        raise ValueError("gaussian_symbol builds d = 1 symbols")
    x = spec2.coords()[:, None]
    xi = spec2.freqs()[None, :]
    vals = np.exp(-((x - center[0]) ** 2 + (xi - center[1]) ** 2) / (2 * width ** 2))
    vals = vals * np.exp(1j * (freq[0] * x + freq[1] * xi)) * x ** poly
    return SampledField(spec2, vals)


def random_symbol(spec2: GridSpec, rng: np.random.Generator, atoms: int = 3) -> SampledField:
    """Sum of a few Gaussian bumps with random centers in ``[-1, 1]^2`` and complex weights."""
    total = np.zeros(spec2.shape, dtype=complex)
    for _ in range(atoms):
        c = rng.uniform(-1, 1, size=2)
        w = rng.uniform(0.8, 1.2)
        coef = rng.standard_normal() + 1j * rng.standard_normal()
        total += coef * gaussian_symbol(spec2, tuple(c), w).values
    return SampledField(spec2, total)


def separable_gaussian_amplitude(spec3: GridSpec, rng: np.random.Generator) -> SampledField:
    """``g1(x) g2(y) g3(zeta)`` with random centers, widths and modulations (d = 1)."""
    x = spec3.coords()
    zeta = spec3.freqs()
    factors = []
    for axis, grid in enumerate((x, x, zeta)):
        c = rng.uniform(-1, 1)
        w = rng.uniform(0.7, 1.3)
        k = rng.uniform(-1, 1)
        factors.append(np.exp(-(grid - c) ** 2 / (2 * w ** 2) + 1j * k * grid))
    vals = np.einsum("i,j,k->ijk", *factors)
    return SampledField(spec3, vals)


def pseudo_weight_condition(omega: Weight, omega1: Weight, omega2: Weight, theta: Weight | None = None,
                            samples: int = 2000, radius: float = 4.0, seed: int = 0, d: int = 1) -> float:
    """Largest sampled ``omega2(x,xi) / (omega1(z,zeta) omega(x,z,zeta+eta,xi-zeta-eta,eta,z-x) theta(eta,z))``."""
    rng = np.random.default_rng(seed)
    x, z, xi, eta, zeta = (rng.uniform(-radius, radius, size=(samples, d)) for _ in range(5))
    lhs = _log(omega2, np.concatenate([x, xi], 1)) - _log(omega1, np.concatenate([z, zeta], 1))
    arg = np.concatenate([x, z, zeta + eta, xi - zeta - eta, eta, z - x], 1)
    rhs = _log(omega, arg) + (0.0 if theta is None else _log(theta, np.concatenate([eta, z], 1)))
    return float(np.exp(np.max(lhs - rhs)))


def _log(w: Weight, pts: np.ndarray) -> np.ndarray:
    return np.zeros(len(pts)) if is_trivial(w) else w.log_value(pts)


@dataclass
class ContinuityConfig:
    p: float = math.inf
    q: float = 1.0
    p1: float = 2.0
    q1: float = 2.0
    p2: float = 2.0
    q2: float = 2.0
    omega: Weight = ONE
    omega1: Weight = ONE
    omega2: Weight = ONE
    resolutions: tuple[int, ...] = (12, 16)
    family_size: int = 10
    seed: int = 0
    symbol: Callable[[GridSpec], SampledField] | None = None
    family: Callable[[GridSpec], list[SampledField]] | None = None


def _fields_1d(spec: GridSpec, count: int, seed: int) -> list[SampledField]:
    rng = np.random.default_rng(seed)
    x = spec.coords()
    out = []
    for _ in range(count):
        c, w, k = rng.uniform(-1.5, 1.5), rng.uniform(0.6, 1.4), rng.uniform(-2, 2)
        out.append(SampledField(spec, np.exp(-(x - c) ** 2 / (2 * w ** 2) + 1j * k * x)))
    return out


def operator_ratio(op: OperatorMatrix, amplitude_norm: float, f: SampledField, config: ContinuityConfig) -> float:
    """``||Op f||_{M^{p2,q2}_(omega2)} / (amplitude_norm ||f||_{M^{p1,q1}_(omega1)})`` with Gaussian windows."""
    win = gaussian_window(f.spec)
    num = modulation_norm(op.apply(f), win, config.p2, config.q2, config.omega2)
    den = modulation_norm(f, win, config.p1, config.q1, config.omega1)
    return num / (amplitude_norm * den)


def continuity_experiment(config: ContinuityConfig) -> dict:
    """Sup-ratio ``||Op(a) f|| / (||a||_{M^{p,inf,p,q,q,q}_(omega)} ||f||)`` per resolution (d = 1)."""
    rows = []
    for n in config.resolutions:
        spec = GridSpec.self_dual(1, n)
        spec2 = spec.with_dim(2)
        a0 = config.symbol(spec2) if config.symbol else gaussian_symbol(spec2)
        a = extend_symbol(a0, gaussian_window(spec, peak_one=True))
        anorm = amplitude_mod_norm(a, None, (config.p, math.inf, config.p), (config.q,) * 3, config.omega)
        if anorm == 0:
            rows.append({"N": n, "R": 0.0, "amplitude_norm": 0.0, "degenerate": True})
            continue
        op = op_from_amplitude(a)
        family = config.family(spec) if config.family else _fields_1d(spec, config.family_size, config.seed)
        ratios = pmap(lambda f: operator_ratio(op, anorm, f, config), family)
        rows.append({"N": n, "R": float(max(ratios)), "amplitude_norm": anorm, "degenerate": False})
    first, last = rows[0]["R"], rows[-1]["R"]
    growth = last / first if first > 0 else math.nan
    return {"resolutions": rows, "growth": growth,
            "weight_condition": pseudo_weight_condition(config.omega, config.omega1, config.omega2)}
