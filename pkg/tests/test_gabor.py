import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from modspace.errors import GridMismatch, MismatchedGrid, NotAFrame
from modspace.gabor import (GaborSystem, PhaseSpaceArray, Window, analysis_matrix, dual_window, frame_bounds,
                            frame_operator, gabor_coefficients, gabor_synthesis, gaussian_window, lattice_indices,
                            modulation_norm, phase_space_norm, stft, synthesis_matrix, window_decay)
from modspace.lattice import GridSpec, SampledField
from modspace.trace import random_family
from modspace.weights import PolyBracket


def direct_stft(f, phi, n_idx, k_idx):
    """Plain quadrature of the discrete STFT at one lattice point."""
    spec = f.spec
    x = spec.coords()
    xi = spec.freqs()[k_idx]
    n = spec.n
    total = 0j
    for m in range(n):
        shifted = phi.values[(m - n_idx + n // 2) % n]
        total += f.values[m] * np.conj(shifted) * np.exp(-1j * x[m] * xi)
    return (2 * math.pi) ** -0.5 * spec.step * total


def test_gaussian_self_stft_matches_quadrature_and_closed_form():
    spec = GridSpec.self_dual(1, 64)
    g = gaussian_window(spec)
    v = stft(g.field, g).values
    x, xi = spec.coords(), spec.freqs()
    for n in range(0, 64, 7):
        for k in range(0, 64, 5):
            assert v[n, k] == pytest.approx(direct_stft(g.field, g, n, k), abs=1e-14)
    inside = (np.abs(x)[:, None] <= 3) & (np.abs(xi)[None, :] <= 3)
    closed = (2 * math.pi) ** -0.5 * np.exp(-(x[:, None] ** 2 + xi[None, :] ** 2) / 4)
    rel = np.abs(np.abs(v) - closed) / closed
    assert np.max(rel[inside]) < 1e-6


def test_stft_of_zero(grid16):
    assert not np.any(stft(SampledField(grid16, np.zeros(16)), gaussian_window(grid16)).values)


def test_stft_translation_covariance(grid32):
    g = gaussian_window(grid32)
    f = random_family(grid32, 1, 3)[0]
    v = np.abs(stft(f, g).values)
    v_shift = np.abs(stft(SampledField(grid32, np.roll(f.values, 1)), g).values)
    assert np.max(np.abs(v_shift - np.roll(v, 1, axis=0))) < 1e-13


def test_stft_rejects_other_grid(grid16, grid32):
    with pytest.raises((GridMismatch, MismatchedGrid)):
        stft(SampledField(grid16, np.ones(16)), gaussian_window(grid32))


def test_moyal_identity():
    spec = GridSpec.self_dual(1, 64)
    g = gaussian_window(spec)
    for f in random_family(spec, 20, 4):
        total = np.sum(np.abs(stft(f, g).values) ** 2) * spec.step * spec.freq_step
        assert total == pytest.approx(f.l2_norm() ** 2 * g.grid_norm ** 2, rel=1e-6)


def test_sub_lattice_coefficients_match_direct_sum(grid16, rng):
    f = SampledField(grid16, rng.standard_normal(16) + 1j * rng.standard_normal(16))
    system = GaborSystem(grid16, 2, 2, gaussian_window(grid16))
    c = gabor_coefficients(f, system).values
    idx = lattice_indices(16, 2)
    for i, n in enumerate(idx):
        for j, k in enumerate(idx):
            assert c[i, j] == pytest.approx(direct_stft(f, system.window, n, k), abs=1e-10)
    full = GaborSystem(grid16, 1, 1, gaussian_window(grid16))
    assert np.array_equal(gabor_coefficients(f, full).values, stft(f, full.window).values)


def test_sub_lattice_contains_origin():
    for n, s in [(16, 3), (48, 4), (12, 5)]:
        if n % s == 0:
            assert n // 2 in lattice_indices(n, s)


def test_analysis_matrix_reproduces_coefficients(grid16, rng):
    system = GaborSystem(grid16, 2, 4, gaussian_window(grid16))
    f = SampledField(grid16, rng.standard_normal(16))
    c = analysis_matrix(system) @ f.values
    assert np.allclose(c, gabor_coefficients(f, system).values.ravel(), atol=1e-14)


def test_full_lattice_frame_is_tight(grid16):
    system = GaborSystem(grid16, 1, 1, gaussian_window(grid16))
    s = frame_operator(system).entries
    lo, hi = frame_bounds(system)
    assert hi / lo == pytest.approx(1.0, abs=1e-10)
    assert np.allclose(s, lo * np.eye(16), atol=1e-10 * lo)
    gamma = dual_window(system)
    assert np.allclose(gamma.values * lo, system.window.values, atol=1e-12)


def test_density_violation_is_not_a_frame(grid16):
    with pytest.raises(NotAFrame):
        GaborSystem(grid16, 8, 4, gaussian_window(grid16))


def test_round_trip_with_canonical_dual():
    spec = GridSpec.self_dual(1, 48)
    system = GaborSystem(spec, 4, 4, gaussian_window(spec)).with_dual()
    s = frame_operator(system).entries
    assert np.allclose(s @ system.dual.values, system.window.values, atol=1e-8)
    for f in random_family(spec, 20, 5):
        back = gabor_synthesis(gabor_coefficients(f, system), system.dual)
        assert np.linalg.norm(back.values - f.values) <= 1e-8 * np.linalg.norm(f.values)
    # the dense matrices compose to the identity
    assert np.allclose(synthesis_matrix(system, system.dual) @ analysis_matrix(system), np.eye(48), atol=1e-10)


def test_unit_coefficient_synthesizes_window(grid16):
    system = GaborSystem(grid16, 2, 2, gaussian_window(grid16))
    m = len(lattice_indices(16, 2))
    c = np.zeros((m, m), dtype=complex)
    origin = list(lattice_indices(16, 2)).index(8)
    c[origin, origin] = 1.0
    out = gabor_synthesis(PhaseSpaceArray(c, grid16, (2, 2)), system.window)
    assert np.allclose(out.values, math.sqrt(2 * math.pi) * system.window.values, atol=1e-15)


@given(st.integers(0, 2**32 - 1))
def test_synthesis_is_linear(seed):
    spec = GridSpec.self_dual(1, 16)
    rng = np.random.default_rng(seed)
    win = gaussian_window(spec)
    c1, c2 = (rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8)) for _ in range(2))
    lhs = gabor_synthesis(PhaseSpaceArray(c1 + c2, spec, (2, 2)), win).values
    rhs = (gabor_synthesis(PhaseSpaceArray(c1, spec, (2, 2)), win).values
           + gabor_synthesis(PhaseSpaceArray(c2, spec, (2, 2)), win).values)
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_modulation_norm_l2_case():
    spec = GridSpec.self_dual(1, 64)
    g = gaussian_window(spec)
    for f in random_family(spec, 5, 6):
        assert modulation_norm(f, g, 2, 2) == pytest.approx(f.l2_norm() * g.grid_norm, rel=1e-6)
    assert modulation_norm(SampledField(spec, np.zeros(64)), g, 2, 2) == 0.0


def test_modulation_norm_homogeneous_for_small_exponents(grid32):
    f = random_family(grid32, 1, 7)[0]
    g = gaussian_window(grid32)
    w = PolyBracket(1.0)
    one = modulation_norm(f, g, 0.5, 0.5, w)
    assert modulation_norm(2 * f, g, 0.5, 0.5, w) == pytest.approx(2 * one, rel=1e-12)


def test_modulation_norm_monotone_in_exponents(grid32):
    f = random_family(grid32, 1, 8)[0]
    g = gaussian_window(grid32)
    exps = [0.5, 1.0, 2.0, 4.0, math.inf]
    for flavor in "MW":
        vals = [modulation_norm(f, g, p, 1.0, flavor=flavor, unit_cells=True) for p in exps]
        assert all(a >= b * (1 - 1e-12) for a, b in zip(vals, vals[1:]))
        vals = [modulation_norm(f, g, 1.0, q, flavor=flavor, unit_cells=True) for q in exps]
        assert all(a >= b * (1 - 1e-12) for a, b in zip(vals, vals[1:]))


def test_gaussian_window_decay_bounded():
    bounds = [window_decay(gaussian_window(GridSpec.self_dual(1, n)), 0.2) for n in (32, 64)]
    assert all(math.isfinite(b) for b in bounds)
    assert bounds[1] == pytest.approx(bounds[0], rel=0.05)


def test_norm_equivalence_between_windows_is_stable():
    intervals = []
    for n in (32, 64):
        spec = GridSpec.self_dual(1, n)
        g = gaussian_window(spec)
        system = GaborSystem(spec, 2, 2, g).with_dual()
        dual = Window(system.dual.field * (g.grid_norm / system.dual.grid_norm))
        ratios = [modulation_norm(f, g, 1, 1) / modulation_norm(f, dual, 1, 1) for f in random_family(spec, 20, 9)]
        intervals.append((min(ratios), max(ratios)))
    c = max(max(i[1], 1 / i[0]) for i in intervals)
    assert c < 1.5
    assert intervals[1][0] == pytest.approx(intervals[0][0], rel=0.1)
    assert intervals[1][1] == pytest.approx(intervals[0][1], rel=0.1)


def test_phase_space_norm_flavors_agree_when_p_equals_q(grid16, rng):
    c = PhaseSpaceArray(rng.standard_normal((16, 16)), grid16, (1, 1))
    assert phase_space_norm(c, (1.5,), (1.5,), flavor="M") == pytest.approx(
        phase_space_norm(c, (1.5,), (1.5,), flavor="W"), rel=1e-12)


def test_quasi_norm_window_equivalence_settles_under_refinement():
    # Gaussian against a twice-wider Gaussian, both unit-normalized on the grid, at p = q = 1/2
    intervals = []
    for n in (64, 128):
        spec = GridSpec.self_dual(1, n)
        g = gaussian_window(spec)
        wide = SampledField(spec, np.exp(-spec.coords() ** 2 / 8) + 0j)
        wide = Window(SampledField(spec, wide.values / wide.l2_norm()))
        ratios = [modulation_norm(f, g, 0.5, 0.5) / modulation_norm(f, wide, 0.5, 0.5)
                  for f in random_family(spec, 20, 9)]
        intervals.append((min(ratios), max(ratios)))
    assert all(0.5 < lo <= hi < 2.0 for lo, hi in intervals)
    assert intervals[1][0] == pytest.approx(intervals[0][0], rel=0.02)
    assert intervals[1][1] == pytest.approx(intervals[0][1], rel=0.02)
