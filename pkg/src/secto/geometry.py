"""Levi-Civita connection and Riemann tensor from metric derivatives.

Derivative arrays use the layout ``dg[p, i, j] = d_p g_ij`` and
``ddg[p, q, i, j] = d_p d_q g_ij``.

Curvature convention: ``Rm(u, v) = nabla_u nabla_v - nabla_v nabla_u - nabla_[u,v]``
with components ``Rm(e_k, e_l) e_j = R^i_{jkl} e_i``. The operator on so(g)
sends ``e_k ^ e_l`` to the matrix ``Rm(e_k, e_l)``; with this choice a space
of constant sectional curvature ``K`` has operator ``K * id``.
"""
from __future__ import annotations

import numpy as np

from .linalg import BilinearForm, so_basis
from .sectional import SectionalRep

__all__ = [
    "christoffel_from_derivs",
    "christoffel_derivative",
    "riemann_from_derivs",
    "riemann_at_critical_point",
    "riemann_operator",
    "covariant_derivative_11",
    "hessian",
]


def _first_kind(dg):
    # Gamma_{l, ij} = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
    return 0.5 * (np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg)


def christoffel_from_derivs(g, dg) -> np.ndarray:
    """``Gamma[k, i, j] = Gamma^k_{ij}``."""
    ginv = np.linalg.inv(g)
    return np.einsum("kl,lij->kij", ginv, _first_kind(dg))


def christoffel_derivative(g, dg, ddg) -> np.ndarray:
    """``dGamma[m, k, i, j] = d_m Gamma^k_{ij}``."""
    ginv = np.linalg.inv(g)
    dginv = -np.einsum("ka,mab,bl->mkl", ginv, dg, ginv)
    first = _first_kind(dg)
    dfirst = 0.5 * (np.einsum("mijl->mlij", ddg) + np.einsum("mjil->mlij", ddg) - ddg)
    return np.einsum("mkl,lij->mkij", dginv, first) + np.einsum("kl,mlij->mkij", ginv, dfirst)


def riemann_from_derivs(g, dg, ddg) -> np.ndarray:
    """``Riem[i, j, k, l] = R^i_{jkl}``."""
    G = christoffel_from_derivs(g, dg)
    dG = christoffel_derivative(g, dg, ddg)
    return (np.einsum("kilj->ijkl", dG) - np.einsum("likj->ijkl", dG)
            + np.einsum("ika,alj->ijkl", G, G) - np.einsum("ila,akj->ijkl", G, G))


def riemann_at_critical_point(g, ddg) -> np.ndarray:
    """``R^i_{jkl}`` where all first derivatives of the metric vanish.

    Closed form ``R_{ajkl} = 1/2 (d_j d_k g_al + d_a d_l g_jk - d_a d_k g_jl - d_j d_l g_ak)``
    with the first index raised afterwards.
    """
    low = 0.5 * (np.einsum("jkal->ajkl", ddg) + np.einsum("aljk->ajkl", ddg)
                 - np.einsum("akjl->ajkl", ddg) - np.einsum("jlak->ajkl", ddg))
    return np.einsum("ia,ajkl->ijkl", np.linalg.inv(g), low)


def riemann_operator(riem, g) -> SectionalRep:
    """Package ``R^i_{jkl}`` as an operator on so(g) in the wedge basis."""
    form = g if isinstance(g, BilinearForm) else BilinearForm(np.asarray(g, float))
    basis = so_basis(form)
    cols = [basis.coords(riem[:, :, k, l]) for k, l in basis.pairs]
    M = np.array(cols).T if cols else np.zeros((0, 0))
    return SectionalRep(M, basis, {"source": "riemann"})


def covariant_derivative_11(A, dA, Gamma) -> np.ndarray:
    """``(nabla_p A)^i_j = d_p A^i_j + Gamma^i_{pa} A^a_j - A^i_a Gamma^a_{pj}``."""
    return dA + np.einsum("ipa,aj->pij", Gamma, A) - np.einsum("ia,apj->pij", A, Gamma)


def hessian(df, ddf, Gamma) -> np.ndarray:
    """Covariant Hessian ``H_ij = d_i d_j f - Gamma^k_ij d_k f``."""
    return ddf - np.einsum("kij,k->ij", Gamma, df)
