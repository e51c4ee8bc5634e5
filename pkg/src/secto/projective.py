"""Projectively equivalent metric pairs.

The comparison tensor of a pair ``(g, gbar)`` is

    A = |det gbar / det g|^(1/(n+1)) gbar^{-1} g,

and the pair is projectively equivalent iff ``A`` solves the linear system
``nabla_u A = 1/2 (u (x) dtrA + (u (x) dtrA)^*)``. The curvature operator of
``g`` is then sectional for ``A`` and the Hessian of ``trA`` (see
:func:`bmk_check` for the sign under this package's curvature convention).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.integrate
import scipy.spatial.distance
import sympy

from .geometry import (
    christoffel_from_derivs,
    covariant_derivative_11,
    hessian,
    riemann_from_derivs,
    riemann_operator,
)
from .holonomy import QuadraticMetric
from .linalg import BilinearForm, commutator, g_adjoint, sym_residual
from .sectional import SectionalRep, _null_space, sectional_residual

__all__ = [
    "ComparisonJet",
    "ComparisonTensor",
    "MetricField",
    "bmk_check",
    "comparison_jet",
    "comparison_tensor",
    "compatibility_residual",
    "corollary_feasibility",
    "curvature_operator",
    "dini_pair",
    "gbar_roundtrip",
    "geodesic",
    "geodesic_coincidence",
    "hausdorff",
    "sphere_patch",
]

# Sign relating B in [R(X), A] = [X, B] to the Hessian of trA. Differentiating
# the compatibility system gives [Rm(u, v), A] = -[u ^ v, nabla grad(trA / 2)]
# for Rm(u, v) = nabla_u nabla_v - nabla_v nabla_u - nabla_[u,v].
HESSIAN_SIGN = -1.0


@dataclass(frozen=True, eq=False)
class MetricField:
    """Metric on a coordinate box with value, first and second derivatives.

    ``jet(x)`` returns ``(g, dg, ddg)`` with ``dg[p, i, j] = d_p g_ij`` and
    ``ddg[p, q, i, j] = d_p d_q g_ij``. Exact fields come from sympy
    expressions or quadratic data; black-box evaluators use central
    differences with one Richardson extrapolation.
    """

    dim: int
    jet_fn: Callable
    mode: str = "exact"
    domain: tuple | None = None
    source: dict = field(default_factory=dict)

    def jet(self, x):
        x = np.asarray(x, dtype=float)
        if self.domain is not None:
            lo, hi = np.asarray(self.domain, float).T
            if np.any(x <= lo) or np.any(x >= hi):
                raise ValueError(f"point {x.tolist()} is outside the domain box")
        g, dg, ddg = self.jet_fn(x)
        s = np.linalg.svd(g, compute_uv=False)
        if s[-1] <= 1e-12 * s[0]:
            raise np.linalg.LinAlgError(f"metric is singular at {x.tolist()}")
        return g, dg, ddg

    def metric(self, x) -> np.ndarray:
        return self.jet(x)[0]

    # -------------------------------------------------------- constructors

    @classmethod
    def from_expressions(cls, coords: Sequence[str], components, domain=None, rational: bool = False) -> "MetricField":
        syms = sympy.symbols(list(coords), real=True)
        local = {str(s): s for s in syms}
        n = len(syms)
        G = sympy.Matrix(n, n, lambda i, j: sympy.sympify(components[i][j], locals=local))
        if G != G.T:
            raise ValueError("metric components are not symmetric")
        if rational:
            for e in G:
                if not e.is_rational_function(*syms):
                    raise ValueError(f"component {e} is not a rational function of the coordinates")
        dG = [G.diff(s) for s in syms]
        ddG = [[d.diff(s) for s in syms] for d in dG]
        f0 = sympy.lambdify(syms, G, "numpy")
        f1 = sympy.lambdify(syms, dG, "numpy")
        f2 = sympy.lambdify(syms, ddG, "numpy")

        def jet(x):
            return (np.array(f0(*x), dtype=float), np.array(f1(*x), dtype=float), np.array(f2(*x), dtype=float))

        src = {"kind": "rational" if rational else "symbolic", "coords": list(coords),
               "coeffs": [[str(c) for c in row] for row in components]}
        return cls(n, jet, "exact", None if domain is None else tuple(map(tuple, domain)), src)

    @classmethod
    def from_quadratic(cls, q: QuadraticMetric, domain=None) -> "MetricField":
        return cls(q.n, q.derivatives, "exact", domain, {"kind": "quadratic"})

    @classmethod
    def from_callable(cls, fn: Callable, dim: int, h: float = 1e-4, domain=None) -> "MetricField":
        """Finite-difference jet (central differences, one Richardson step)."""

        def d1(x, step):
            E = np.eye(dim) * step
            return np.array([(fn(x + E[p]) - fn(x - E[p])) / (2 * step) for p in range(dim)])

        def d2(x, step):
            E = np.eye(dim) * step
            out = np.zeros((dim, dim, dim, dim))
            for p in range(dim):
                for q in range(dim):
                    out[p, q] = (fn(x + E[p] + E[q]) - fn(x + E[p] - E[q])
                                 - fn(x - E[p] + E[q]) + fn(x - E[p] - E[q])) / (4 * step * step)
            return out

        def jet(x):
            dg = (4 * d1(x, h / 2) - d1(x, h)) / 3
            ddg = (4 * d2(x, h / 2) - d2(x, h)) / 3
            return np.asarray(fn(x), float), dg, ddg

        return cls(dim, jet, "fd", domain, {"kind": "callable", "h": h})

    @classmethod
    def from_json(cls, data: dict, domain=None) -> "MetricField":
        kind = data.get("kind")
        if kind in ("rational", "symbolic"):
            return cls.from_expressions(data["coords"], data["coeffs"], domain, rational=kind == "rational")
        if kind == "quadratic":
            return cls.from_quadratic(QuadraticMetric(BilinearForm(np.asarray(data["g0"], float)),
                                                      np.asarray(data["Bq"], float)), domain)
        raise ValueError(f"unknown metric kind {kind!r}")


def dini_pair():
    """Classical 2D pair on x in (2, 3), y in (1, 2):
    ``g = (x - y)(dx^2 + dy^2)``, ``gbar = (1/y - 1/x)(dx^2/x + dy^2/y)``."""
    box = ((2.0, 3.0), (1.0, 2.0))
    g = MetricField.from_expressions(["x", "y"], [["x - y", "0"], ["0", "x - y"]], box, rational=True)
    gbar = MetricField.from_expressions(
        ["x", "y"], [["(1/y - 1/x)/x", "0"], ["0", "(1/y - 1/x)/y"]], box, rational=True)
    return g, gbar


def sphere_patch():
    """Round unit sphere ``d theta^2 + sin(theta)^2 d phi^2``, theta in (0.5, 2.5)."""
    return MetricField.from_expressions(["theta", "phi"], [["1", "0"], ["0", "sin(theta)**2"]],
                                        ((0.5, 2.5), (-3.0, 3.0)))


# ------------------------------------------------------------ comparison tensor


@dataclass
class ComparisonJet:
    A: np.ndarray
    dA: np.ndarray  # dA[p] = d_p A
    ddA: np.ndarray  # ddA[p, q] = d_p d_q A
    g_symmetry_residual: float


def comparison_jet(g: MetricField, gbar: MetricField, x) -> ComparisonJet:
    """``A`` and its first two coordinate derivatives from exact metric jets."""
    G, dG, ddG = g.jet(x)
    H, dH, ddH = gbar.jet(x)
    n = G.shape[0]
    Gi = np.linalg.inv(G)
    Hi = np.linalg.inv(H)
    ratio = np.linalg.det(H) / np.linalg.det(G)
    f = abs(ratio) ** (1.0 / (n + 1))
    M = Hi @ G

    def dlogdet(Ci, d1, d2):
        L1 = np.einsum("ab,pba->p", Ci, d1)
        L2 = np.einsum("ab,pqba->pq", Ci, d2) - np.einsum("ab,qbc,cd,pda->pq", Ci, d1, Ci, d1)
        return L1, L2

    LG1, LG2 = dlogdet(Gi, dG, ddG)
    LH1, LH2 = dlogdet(Hi, dH, ddH)
    phi1 = (LH1 - LG1) / (n + 1)
    phi2 = (LH2 - LG2) / (n + 1)
    M1 = np.einsum("ab,pbc->pac", Hi, dG - np.einsum("pab,bc->pac", dH, M))
    M2 = (-np.einsum("ab,qbc,pcd->pqad", Hi, dH, M1)
          + np.einsum("ab,pqbd->pqad", Hi, ddG - np.einsum("pqab,bc->pqac", ddH, M)
                      - np.einsum("pab,qbc->pqac", dH, M1)))
    A = f * M
    dA = f * (phi1[:, None, None] * M + M1)
    ddA = f * (phi1[None, :, None, None] * (phi1[:, None, None, None] * M + M1[:, None])
               + phi2[:, :, None, None] * M
               + phi1[:, None, None, None] * M1[None, :]
               + M2)
    return ComparisonJet(A, dA, ddA, sym_residual(A, G))


def comparison_tensor(g: MetricField, gbar: MetricField, x) -> np.ndarray:
    G = g.metric(x)
    H = gbar.metric(x)
    n = G.shape[0]
    return abs(np.linalg.det(H) / np.linalg.det(G)) ** (1.0 / (n + 1)) * np.linalg.solve(H, G)


@dataclass(frozen=True, eq=False)
class ComparisonTensor:
    """Pointwise evaluator of the comparison tensor of ``(g, gbar)``."""

    g: MetricField
    gbar: MetricField

    def __call__(self, x) -> np.ndarray:
        return comparison_tensor(self.g, self.gbar, x)

    def jet(self, x) -> ComparisonJet:
        return comparison_jet(self.g, self.gbar, x)


def gbar_roundtrip(g, A, x=None) -> np.ndarray:
    """Recover ``gbar = g(A^{-1} ., .) / |det A|``.

    ``g`` may be a :class:`MetricField` (evaluated at ``x``) or a matrix.
    """
    G = g.metric(x) if isinstance(g, MetricField) else np.asarray(g, float)
    A = np.asarray(A, float)
    d = np.linalg.det(A)
    if abs(d) <= 1e-14 * max(1.0, np.linalg.norm(A)) ** A.shape[0]:
        raise np.linalg.LinAlgError("comparison tensor is singular")
    # gbar(u, v) = g(A^{-1} u, v): matrix (A^{-1})^T G; symmetric since A is g-symmetric
    return np.linalg.solve(A, np.eye(A.shape[0])).T @ G / abs(d)


def _rhs(G, dtr):
    n = G.shape[0]
    out = np.zeros((n, n, n))
    for p in range(n):
        U = np.zeros((n, n))
        U[p, :] = dtr
        out[p] = 0.5 * (U + g_adjoint(U, G))
    return out


def compatibility_residual(g: MetricField, A, x) -> float:
    """``max_p |nabla_p A - 1/2 (e_p (x) dtrA + (e_p (x) dtrA)^*)| / (1 + |A|)``.

    ``A`` is a :class:`ComparisonTensor` or the second metric of the pair.
    ``e_p (x) dtrA`` is the rank-one matrix whose row ``p`` is ``dtrA``; the
    star is its g-adjoint.
    """
    if isinstance(A, MetricField):
        A = ComparisonTensor(g, A)
    G, dG, _ = g.jet(x)
    jet = A.jet(x)
    Gamma = christoffel_from_derivs(G, dG)
    nab = covariant_derivative_11(jet.A, jet.dA, Gamma)
    dtr = np.einsum("pii->p", jet.dA)
    D = nab - _rhs(G, dtr)
    return float(max(np.linalg.norm(D[p]) for p in range(G.shape[0])) / (1.0 + np.linalg.norm(jet.A)))


def curvature_operator(g: MetricField, x) -> SectionalRep:
    G, dG, ddG = g.jet(x)
    return riemann_operator(riemann_from_derivs(G, dG, ddG), G)


def hessian_operator(g: MetricField, gbar: MetricField, x) -> np.ndarray:
    """``B = HESSIAN_SIGN * 1/2 g^{-1} Hess(trA)``."""
    G, dG, _ = g.jet(x)
    jet = comparison_jet(g, gbar, x)
    Gamma = christoffel_from_derivs(G, dG)
    H = hessian(np.einsum("pii->p", jet.dA), np.einsum("pqii->pq", jet.ddA), Gamma)
    return HESSIAN_SIGN * 0.5 * np.linalg.solve(G, H)


def bmk_check(g: MetricField, gbar: MetricField, x) -> dict:
    """Sectional residual of the curvature of ``g`` for ``(A, B)`` from the pair."""
    jet = comparison_jet(g, gbar, x)
    B = hessian_operator(g, gbar, x)
    R = curvature_operator(g, x)
    return {
        "point": np.asarray(x, float).tolist(),
        "A": jet.A.tolist(),
        "B": B.tolist(),
        "A_g_symmetry": jet.g_symmetry_residual,
        "compatibility_residual": compatibility_residual(g, gbar, x),
        "sectional_residual": sectional_residual(R, jet.A, B),
        "curvature_symmetry": R.symmetry_residual(),
    }


def corollary_feasibility(g: MetricField, x, rcond: float = 1e-10) -> dict:
    """Do g-symmetric ``A`` (non-scalar) and ``B`` with ``[R(X), A] = [X, B]`` exist?

    Solves the homogeneous linear system over Sym(g) x Sym(g) and reports
    the dimension of admissible ``A`` modulo the identity.
    """
    G = g.metric(x)
    R = curvature_operator(g, x)
    form = R.form
    n = G.shape[0]
    sym = []
    for i in range(n):
        for j in range(i, n):
            S = np.zeros((n, n))
            S[i, j] = S[j, i] = 1.0
            sym.append(form.inverse @ S)
    cols = []
    for S in sym:  # A-part
        cols.append(np.concatenate([commutator(R(X), S).ravel() for X in R.basis.elements]))
    for S in sym:  # B-part
        cols.append(np.concatenate([-commutator(X, S).ravel() for X in R.basis.elements]))
    M = np.array(cols).T
    Z = _null_space(M / max(1.0, np.abs(M).max(initial=0.0)), rcond)
    m = len(sym)
    Aparts = np.array([sum(c * S for c, S in zip(z[:m], sym)).ravel() for z in Z.T]).T if Z.size else np.zeros((n * n, 0))
    span = np.hstack([Aparts, np.eye(n).ravel()[:, None]])
    s = np.linalg.svd(span, compute_uv=False)
    dimA = int((s > 1e-8 * max(1.0, s[0])).sum()) - 1
    return {"solution_dim": int(Z.shape[1]), "nonscalar_A_dim": dimA, "feasible": dimA > 0}


# ------------------------------------------------------------ geodesics


def geodesic(g: MetricField, x0, v0, length: float, rtol: float = 1e-11, atol: float = 1e-12):
    """Integrate a geodesic until its coordinate (chord) length reaches ``length``.

    Returns the dense-output solution over the affine parameter together
    with the stopping parameter.
    """
    n = g.dim
    x0 = np.asarray(x0, float)
    v0 = np.asarray(v0, float)
    v0 = v0 / np.linalg.norm(v0)

    def rhs(t, y):
        x, v = y[:n], y[n:2 * n]
        G, dG, _ = g.jet_fn(x)
        Gamma = christoffel_from_derivs(G, dG)
        a = -np.einsum("kij,i,j->k", Gamma, v, v)
        return np.concatenate([v, a, [np.linalg.norm(v)]])

    def done(t, y):
        return y[-1] - length

    done.terminal = True
    sol = scipy.integrate.solve_ivp(rhs, (0.0, 100.0 * length), np.concatenate([x0, v0, [0.0]]),
                                    method="DOP853", rtol=rtol, atol=atol, dense_output=True, events=done)
    if sol.status != 1:
        raise RuntimeError(f"geodesic did not reach length {length}: {sol.message}")
    return sol, float(sol.t_events[0][0])


def _chord_resample(points: np.ndarray, count: int) -> np.ndarray:
    seg = np.linalg.norm(np.diff(points, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    t = np.linspace(0.0, s[-1], count)
    return np.column_stack([np.interp(t, s, points[:, k]) for k in range(points.shape[1])])


def hausdorff(P: np.ndarray, Q: np.ndarray) -> float:
    d1 = scipy.spatial.distance.directed_hausdorff(P, Q)[0]
    d2 = scipy.spatial.distance.directed_hausdorff(Q, P)[0]
    return float(max(d1, d2))


def geodesic_coincidence(g: MetricField, gbar: MetricField, x0, directions: int = 20,
                         length: float = 0.3, samples: int = 4000, seed: int | None = None) -> dict:
    """Trace geodesics of both metrics from ``x0`` in the same directions and
    compare them as point sets (Hausdorff distance after chord-length
    resampling)."""
    x0 = np.asarray(x0, float)
    n = g.dim
    if n == 2:
        ang = np.linspace(0.0, 2 * np.pi, directions, endpoint=False)
        dirs = np.column_stack([np.cos(ang), np.sin(ang)])
    else:
        rng = np.random.default_rng(seed)
        dirs = rng.normal(size=(directions, n))
    dists = []
    for d in dirs:
        curves = []
        for metric in (g, gbar):
            sol, t_end = geodesic(metric, x0, d, length)
            ts = np.linspace(0.0, t_end, 8 * samples)
            curves.append(_chord_resample(sol.sol(ts)[:n].T, samples))
        dists.append(hausdorff(*curves))
    return {"max_hausdorff": float(max(dists)), "distances": [float(v) for v in dists]}
