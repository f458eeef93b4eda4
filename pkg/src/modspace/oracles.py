"""Slow reference implementations used as independent cross-checks.

Nothing here shares code with the vectorized paths: loops run in plain Python
over explicit index tuples.
"""
from __future__ import annotations

import itertools
import math

import numpy as np


def nested_mixed_norm(F, exponents, permutation=None, cells=None, weight_values=None) -> float:
    """Mixed quasi-norm by explicit recursion over norm axes.

    Norm axis ``k`` runs over original axis ``sigma^{-1}(k)``; the innermost sum is norm axis 0.
    """
    F = np.asarray(F)
    m = F.ndim
    perm = list(range(m)) if permutation is None else list(permutation)
    inv = [0] * m
    for j, k in enumerate(perm):
        inv[k] = j
    cells = [1.0] * m if cells is None else list(cells)
    w = np.ones(F.shape) if weight_values is None else np.broadcast_to(weight_values, F.shape)

    def level(k, fixed):
        # fixed: dict original-axis -> index, for norm axes > k
        ax = inv[k]
        p = exponents[k]
        vals = []
        for i in range(F.shape[ax]):
            idx = dict(fixed)
            idx[ax] = i
            if k == 0:
                key = tuple(idx[a] for a in range(m))
                vals.append(abs(complex(F[key])) * float(w[key]))
            else:
                vals.append(level(k - 1, idx))
        if p == math.inf:
            return max(vals)
        return (math.fsum(v ** p for v in vals) * cells[ax]) ** (1 / p)

    return level(m - 1, {})


def char_poly_singular_values(T) -> np.ndarray:
    """Singular values from the roots of the characteristic polynomial of ``T* T``."""
    T = np.asarray(T, dtype=complex)
    g = T.conj().T @ T
    n = g.shape[0]
    # Faddeev-LeVerrier coefficients of det(lambda I - G)
    coeffs = [1.0 + 0j]
    mk = np.zeros_like(g)
    for k in range(1, n + 1):
        mk = g @ mk + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(g @ mk) / k)
    roots = np.roots(coeffs).real
    return np.sort(np.sqrt(np.clip(roots, 0, None)))[::-1]


def brute_force_convolution(f, g) -> np.ndarray:
    f = np.asarray(f)
    g = np.asarray(g)
    out = np.zeros(np.broadcast_shapes(f.shape, g.shape), dtype=np.result_type(f, g, float))
    shape = out.shape
    for i in itertools.product(*map(range, shape)):
        total = 0
        for j in itertools.product(*map(range, shape)):
            k = tuple((a - b) % n for a, b, n in zip(i, j, shape))
            total += f[j] * g[k]
        out[i] = total
    return out
