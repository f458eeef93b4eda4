import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from modspace.errors import ExponentViolation, MemoryGuard
from modspace.gabor import GaborSystem, gaussian_window
from modspace.lattice import GridSpec, OperatorMatrix, SampledField
from modspace.oracles import char_poly_singular_values
from modspace.spectral import (SchattenConfig, SingularSpectrum, conjugate_exponent, schatten_bound_experiment,
                               schatten_quasi_norm, singular_values, weighted_m2_conjugate)
from modspace.weights import ONE, PolyBracket


def test_rank_one():
    u = np.array([1.0, 2.0, 2.0])
    v = np.array([0.0, 3.0, 4.0])
    s = singular_values(np.outer(u, v)).values
    assert s[0] == pytest.approx(15.0, rel=1e-14)
    assert np.all(s[1:] < 1e-13)


def test_diagonal_with_negative_entry():
    assert np.allclose(singular_values(np.diag([3.0, 1.0, -2.0])).values, [3.0, 2.0, 1.0], atol=1e-15)


@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_matches_characteristic_polynomial(seed, n):
    rng = np.random.default_rng(seed)
    t = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    assert np.allclose(singular_values(t).values, char_poly_singular_values(t), rtol=1e-6, atol=1e-8)


def test_half_quasi_norm():
    assert schatten_quasi_norm(np.array([4.0, 1.0]), 0.5) == pytest.approx(9.0, rel=1e-15)
    assert schatten_quasi_norm(np.array([4.0, 1.0]), math.inf) == 4.0
    assert schatten_quasi_norm(np.zeros(3), 1.0) == 0.0
    with pytest.raises(ValueError):
        schatten_quasi_norm(np.array([1.0]), 0.0)


@given(st.integers(0, 2**32 - 1))
def test_quasi_norm_decreases_in_p(seed):
    rng = np.random.default_rng(seed)
    s = SingularSpectrum(np.sort(rng.random(8))[::-1])
    ps = [0.25, 0.5, 1.0, 1.5, 2.0, 4.0, math.inf]
    vals = [schatten_quasi_norm(s, p) for p in ps]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_unitary_invariance(rng):
    t = rng.standard_normal((6, 6))
    q1, _ = np.linalg.qr(rng.standard_normal((6, 6)))
    q2, _ = np.linalg.qr(rng.standard_normal((6, 6)))
    assert np.allclose(singular_values(q1 @ t @ q2).values, singular_values(t).values, atol=1e-12)


def test_eckart_young(rng):
    t = rng.standard_normal((8, 8))
    u, s, vh = np.linalg.svd(t)
    for k in range(1, 8):
        tk = (u[:, :k] * s[:k]) @ vh[:k]
        assert np.linalg.norm(t - tk, 2) == pytest.approx(singular_values(t).values[k], rel=1e-12)


def test_spectrum_validation():
    with pytest.raises(ValueError):
        SingularSpectrum(np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        SingularSpectrum(np.array([1.0, -0.5]))


def test_memory_guard():
    with pytest.raises(MemoryGuard):
        singular_values(np.zeros((4097, 2)))


def test_full_lattice_conjugate_keeps_spectrum(rng):
    spec = GridSpec.self_dual(1, 12)
    t = OperatorMatrix(rng.standard_normal((12, 12)) + 0j, spec, spec, "random")
    system = GaborSystem(spec, 1, 1, gaussian_window(spec))
    conj = weighted_m2_conjugate(t, ONE, ONE, system)
    s = singular_values(conj).values
    assert np.allclose(s[:12], singular_values(t).values, rtol=1e-10)
    assert np.all(s[12:] < 1e-10)


def test_weighted_identity_is_at_least_one():
    spec = GridSpec.self_dual(1, 12)
    eye = OperatorMatrix(np.eye(12, dtype=complex), spec, spec, "identity")
    w = PolyBracket(1.0)
    conj = weighted_m2_conjugate(eye, w, w, GaborSystem(spec, 1, 1, gaussian_window(spec)))
    assert singular_values(conj).values[0] >= 1.0 - 1e-12


def test_zero_operator():
    spec = GridSpec.self_dual(1, 8)
    zero = OperatorMatrix(np.zeros((8, 8), dtype=complex), spec, spec, "zero")
    conj = weighted_m2_conjugate(zero, ONE, ONE, GaborSystem(spec, 1, 1, gaussian_window(spec)))
    assert schatten_quasi_norm(singular_values(conj), 0.5) == 0.0


def test_conjugate_exponent():
    assert conjugate_exponent(0.5) == math.inf
    assert conjugate_exponent(1.0) == math.inf
    assert conjugate_exponent(2.0) == 2.0
    assert conjugate_exponent(math.inf) == 1.0


@pytest.mark.parametrize("p,q", [(2.0, 2.5), (4.0, 2.0), (0.5, 1.0)])
def test_exponent_violation(p, q):
    with pytest.raises(ExponentViolation):
        schatten_bound_experiment(SchattenConfig(p=p, q=q, resolutions=(8,), family_size=1))


def test_small_experiment_and_degenerate_member():
    calls = []

    def amp(spec, rng):
        calls.append(1)
        spec3 = spec.with_dim(3)
        if len(calls) == 1:
            return SampledField(spec3, np.zeros(spec3.shape))
        return SampledField(spec3, np.exp(-sum(g ** 2 for g in np.meshgrid(*[spec.coords()] * 3, indexing="ij"))))

    rep = schatten_bound_experiment(SchattenConfig(resolutions=(8,), family_size=2, amplitude=amp))
    row = rep["resolutions"][0]
    assert row["degenerate"] == 1 and row["ratios"][0] is None
    assert 0 < row["max_ratio"] < math.inf
    assert row["i2_frobenius_error"] < 1e-10
    assert not rep["nuclear_surrogate"]
