"""Seeded random inputs for property tests and scenarios.

Entries are drawn uniform in [-1, 1] from ``numpy.random.default_rng`` and
then symmetrized or skewed with respect to the form.
"""
from __future__ import annotations

import numpy as np

from .linalg import BilinearForm, JordanBlock, JordanSpec, MatrixPolynomial, _as_form

__all__ = [
    "random_form",
    "random_g_skew",
    "random_g_symmetric",
    "random_jordan_spec",
    "random_polynomial",
]


def _rng(rng) -> np.random.Generator:
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


def random_g_symmetric(rng, g) -> np.ndarray:
    """``g^{-1} S`` with ``S`` symmetric; g-symmetric by construction."""
    rng = _rng(rng)
    g = _as_form(g)
    M = rng.uniform(-1.0, 1.0, (g.n, g.n))
    return g.inverse @ (M + M.T) / 2


def random_g_skew(rng, g) -> np.ndarray:
    """``g^{-1} K`` with ``K`` antisymmetric; an element of so(g)."""
    rng = _rng(rng)
    g = _as_form(g)
    M = rng.uniform(-1.0, 1.0, (g.n, g.n))
    return g.inverse @ (M - M.T) / 2


def random_form(rng, n: int, indefinite: bool = True) -> BilinearForm:
    """Diagonal form with random signs (all +1 unless ``indefinite``)."""
    rng = _rng(rng)
    signs = rng.choice([-1.0, 1.0], n) if indefinite else np.ones(n)
    return BilinearForm.diagonal(signs)


def random_polynomial(rng, max_degree: int = 5) -> MatrixPolynomial:
    rng = _rng(rng)
    d = int(rng.integers(1, max_degree + 1))
    c = rng.uniform(-1.0, 1.0, d + 1)
    if abs(c[-1]) < 0.1:
        c[-1] = 0.5
    return MatrixPolynomial(c)


def random_jordan_spec(rng, max_n: int = 8, max_block: int = 3, n_eigenvalues: int | None = None) -> JordanSpec:
    """Random real Jordan structure with ``n <= max_n``.

    Eigenvalues are drawn from a small pool so that several blocks often
    share an eigenvalue; signs of the adapted form are random.
    """
    rng = _rng(rng)
    n = int(rng.integers(2, max_n + 1))
    k = n_eigenvalues or int(rng.integers(1, 4))
    pool = np.round(rng.uniform(-1.0, 1.0, k), 3)
    pool = np.unique(pool)
    blocks = []
    left = n
    while left:
        size = int(rng.integers(1, min(max_block, left) + 1))
        blocks.append(JordanBlock(float(rng.choice(pool)), size, int(rng.choice([-1, 1]))))
        left -= size
    return JordanSpec(tuple(blocks))
