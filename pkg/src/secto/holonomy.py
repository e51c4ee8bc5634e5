"""Formal curvature tensors for centralizers and their metric realization.

Given ``A`` in Jordan form with an adapted form ``g0``, the block-pair
construction

    R_formal = sum_{alpha <= beta} R_ab,
    R_ab(X) = d/dt p_ab(A_W + t X_W),  W = V_alpha + V_beta,

(``p_ab`` the minimal polynomial of ``A`` on ``W``, ``X_W`` the part of ``X``
in the ``(alpha, beta)`` and ``(beta, alpha)`` blocks) is a formal curvature
tensor with image in ``g_A``. Its extension ``B(X) = -1/2 sum a_m sum_j A^(m-1-j) X A^j``
(block-wise, on all of gl(V)) defines the quadratic metric
``g(x) = g0 + Bq_{ij,pq} x^p x^q`` with ``A`` parallel and curvature
``R_formal`` at the origin.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    christoffel_from_derivs,
    covariant_derivative_11,
    riemann_at_critical_point,
    riemann_from_derivs,
    riemann_operator,
)
from .linalg import BilinearForm, JordanSpec, MatrixPolynomial, g_adjoint, realize_jordan, so_basis
from .sectional import SectionalRep, bianchi_residual, centralizer, r0_terms

__all__ = [
    "ExtensionTensor",
    "FormalCurvature",
    "QuadraticMetric",
    "berger_certificate",
    "christoffel",
    "covariant_constancy_residual",
    "curvature_at",
    "curvature_from_second_derivatives",
    "extension_tensor",
    "fd_second_derivatives",
    "formal_curvature",
    "nondegeneracy_radius",
    "realize_metric",
    "sample_points",
    "verify_realization",
]


def _block_pairs(spec: JordanSpec):
    """``(alpha, beta, indices of W, minimal polynomial of A on W)``."""
    out = []
    for a in range(len(spec.blocks)):
        for b in range(a, len(spec.blocks)):
            which = [a] if a == b else [a, b]
            idx = np.concatenate([spec.block_indices(c) for c in which])
            out.append((a, b, idx, spec.minimal_polynomial(which)))
    return out


def _projector(n, idx):
    P = np.zeros((n, n))
    P[idx, idx] = 1.0
    return P


def _embedded_terms(A, spec: JordanSpec, a: int, b: int, idx, p: MatrixPolynomial):
    """Derivative-expansion terms of ``p`` on ``W``, acting only on the
    ``(alpha, beta)`` and ``(beta, alpha)`` blocks of ``X``.

    Terms are ``(c, C, D)`` with action ``X -> c C X D``; ``A_W^0`` is the
    projector onto ``W``. Each block of gl(V) is thus covered by exactly one
    pair.
    """
    n = A.shape[0]
    sub = A[np.ix_(idx, idx)]
    Pa = _projector(n, spec.block_indices(a))
    Pb = _projector(n, spec.block_indices(b))
    sides = [(Pa, Pa)] if a == b else [(Pa, Pb), (Pb, Pa)]
    out = []
    for c, C, D in r0_terms(sub, p):
        Cf = np.zeros((n, n))
        Df = np.zeros((n, n))
        Cf[np.ix_(idx, idx)] = C
        Df[np.ix_(idx, idx)] = D
        out += [(c, Cf @ L, Rr @ Df) for L, Rr in sides]
    return out


@dataclass(frozen=True, eq=False)
class FormalCurvature:
    rep: SectionalRep
    A: np.ndarray
    spec: JordanSpec
    pairs: list = field(default_factory=list)  # [(alpha, beta, p_ab coefficients)]


def formal_curvature(spec: JordanSpec) -> FormalCurvature:
    A, g = realize_jordan(spec)
    basis = so_basis(g)
    E = basis.elements
    images = np.zeros_like(E)
    pairs = []
    for a, b, idx, p in _block_pairs(spec):
        pairs.append((a, b, p.coeffs.tolist()))
        for coef, C, D in _embedded_terms(A, spec, a, b, idx, p):
            images += coef * np.einsum("ij,kjl,lm->kim", C, E, D)
    M = basis.coords(images).T if basis.dim else np.zeros((0, 0))
    rep = SectionalRep(M, basis, {"source": "formal", "spec": spec.to_json()})
    return FormalCurvature(rep, A, spec, pairs)


def berger_certificate(spec: JordanSpec, rank_tol: float = 1e-10) -> dict:
    """Compare ``dim span{R_formal(X)}`` with ``dim g_A``.

    A mismatch for specs with more than two blocks per eigenvalue is
    reported as ``flagged`` rather than failed.
    """
    fc = formal_curvature(spec)
    g = fc.rep.form
    cent = centralizer(fc.A, g)
    M = fc.rep.matrix
    if M.size:
        s = np.linalg.svd(M, compute_uv=False)
        rank = int((s > rank_tol * max(1.0, s[0])).sum())
        # image inside g_A
        image_res = max((cent.distance(M[:, k]) for k in range(M.shape[1])), default=0.0) / max(1.0, s[0])
    else:
        rank, image_res = 0, 0.0
    bianchi = bianchi_residual(fc.rep)
    at_most_two = max(spec.blocks_per_eigenvalue().values()) <= 2
    equal = rank == cent.dim
    if equal and bianchi <= 1e-10 and image_res <= 1e-10:
        verdict = "Berger-certified"
    elif at_most_two:
        verdict = "failed"
    else:
        verdict = "flagged"
    return {"image_rank": rank, "centralizer_dim": cent.dim, "bianchi_residual": bianchi,
            "image_residual": float(image_res), "at_most_two_blocks": at_most_two, "verdict": verdict}


@dataclass(frozen=True, eq=False)
class ExtensionTensor:
    """``B(X) = sum c C X D`` on gl(V); :attr:`tensor` holds ``B^{i,p}_{j,q}``
    as ``T[i, j, p, q] = sum c C[i, j] D[p, q]`` so ``B(X)^i_q = T[i,j,p,q] X[j,p]``."""

    terms: tuple
    n: int

    def __call__(self, X) -> np.ndarray:
        X = np.asarray(X, float)
        out = np.zeros((self.n, self.n))
        for c, C, D in self.terms:
            out += c * (C @ X @ D)
        return out

    @property
    def tensor(self) -> np.ndarray:
        T = np.zeros((self.n,) * 4)
        for c, C, D in self.terms:
            T += c * np.einsum("ij,pq->ijpq", C, D)
        return T


def extension_tensor(spec: JordanSpec) -> ExtensionTensor:
    A, _ = realize_jordan(spec)
    terms = []
    for a, b, idx, p in _block_pairs(spec):
        terms += [(-0.5 * c, C, D) for c, C, D in _embedded_terms(A, spec, a, b, idx, p)]
    return ExtensionTensor(tuple(terms), spec.n)


@dataclass(frozen=True, eq=False)
class QuadraticMetric:
    """``g_ij(x) = g0_ij + Bq[i, j, p, q] x^p x^q`` with exact derivatives."""

    g0: BilinearForm
    Bq: np.ndarray

    def __post_init__(self):
        Bq = np.array(self.Bq, dtype=float)
        Bq = 0.25 * (Bq + Bq.transpose(1, 0, 2, 3) + Bq.transpose(0, 1, 3, 2) + Bq.transpose(1, 0, 3, 2))
        Bq.setflags(write=False)
        object.__setattr__(self, "Bq", Bq)

    @property
    def n(self) -> int:
        return self.g0.n

    def metric(self, x) -> np.ndarray:
        x = np.asarray(x, float)
        return self.g0.matrix + np.einsum("ijpq,p,q->ij", self.Bq, x, x)

    def dmetric(self, x) -> np.ndarray:
        x = np.asarray(x, float)
        return 2.0 * np.einsum("ijpq,q->pij", self.Bq, x)

    def ddmetric(self, x=None) -> np.ndarray:
        return 2.0 * np.einsum("ijpq->pqij", self.Bq)

    def derivatives(self, x):
        return self.metric(x), self.dmetric(x), self.ddmetric(x)


def realize_metric(spec: JordanSpec, ext: ExtensionTensor | None = None) -> QuadraticMetric:
    """Lower ``B^{i,p}_{j,q}`` with ``g0`` to ``Bq_{aj,bq} = g0_{ai} g0_{bp} B^{i,p}_{j,q}``."""
    _, g0 = realize_jordan(spec)
    ext = ext or extension_tensor(spec)
    Bq = np.einsum("ai,bp,ijpq->ajbq", g0.matrix, g0.matrix, ext.tensor)
    return QuadraticMetric(g0, Bq)


def _checked_metric(metric: QuadraticMetric, x):
    gx = metric.metric(x)
    s = np.linalg.svd(gx, compute_uv=False)
    if s[-1] <= 1e-12 * s[0]:
        raise np.linalg.LinAlgError(f"metric is singular at x={np.asarray(x).tolist()}")
    return gx


def christoffel(metric: QuadraticMetric, x) -> np.ndarray:
    gx = _checked_metric(metric, x)
    return christoffel_from_derivs(gx, metric.dmetric(x))


def curvature_at(metric: QuadraticMetric, x) -> SectionalRep:
    """Curvature operator on so(g(x)) from exact derivatives."""
    gx = _checked_metric(metric, x)
    riem = riemann_from_derivs(gx, metric.dmetric(x), metric.ddmetric(x))
    return riemann_operator(riem, gx)


def curvature_from_second_derivatives(g0, ddg) -> SectionalRep:
    """Operator at a point where the metric's first derivatives vanish."""
    g0 = np.asarray(getattr(g0, "matrix", g0), float)
    return riemann_operator(riemann_at_critical_point(g0, ddg), g0)


def fd_second_derivatives(metric_fn, x, h: float = 1e-4) -> np.ndarray:
    """Central-difference Hessian ``ddg[p, q, i, j]`` of a metric evaluator."""
    x = np.asarray(x, float)
    n = x.size
    out = np.zeros((n, n) + metric_fn(x).shape)
    I = np.eye(n) * h
    for p in range(n):
        for q in range(n):
            out[p, q] = (metric_fn(x + I[p] + I[q]) - metric_fn(x + I[p] - I[q])
                         - metric_fn(x - I[p] + I[q]) + metric_fn(x - I[p] - I[q])) / (4 * h * h)
    return out


def nondegeneracy_radius(metric: QuadraticMetric) -> float:
    """``0.1 * sqrt(sigma_min(g0) / |Bq|)`` (infinite for a constant metric)."""
    nb = np.linalg.norm(metric.Bq)
    if nb == 0:
        return np.inf
    smin = np.linalg.svd(metric.g0.matrix, compute_uv=False)[-1]
    return 0.1 * np.sqrt(smin / nb)


def sample_points(metric: QuadraticMetric, count: int, seed: int = 0, radius: float | None = None) -> np.ndarray:
    rng = np.random.default_rng(seed)
    r = nondegeneracy_radius(metric) if radius is None else radius
    r = min(r, 0.1)
    pts = rng.normal(size=(count, metric.n))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return pts * r * rng.uniform(0, 1, (count, 1))


def covariant_constancy_residual(metric: QuadraticMetric, A, points) -> float:
    """Worst ``|nabla A| / (1 + |A|)`` over the points for a constant field ``A``."""
    A = np.asarray(A, float)
    worst = 0.0
    for x in np.atleast_2d(points):
        G = christoffel(metric, x)
        nab = covariant_derivative_11(A, np.zeros((metric.n,) * 3), G)
        worst = max(worst, float(np.linalg.norm(nab) / (1.0 + np.linalg.norm(A))))
    return worst


def _gl_basis(n):
    for i in range(n):
        for j in range(n):
            E = np.zeros((n, n))
            E[i, j] = 1.0
            yield E


def verify_realization(spec: JordanSpec, n_points: int = 20, seed: int = 0, fd_check: bool = True,
                       tol_alg: float = 1e-12, tol_nabla: float = 1e-8, tol_curv: float = 1e-8,
                       tol_fd: float = 1e-6, points=None) -> dict:
    """End-to-end check of the realization for one Jordan structure.

    Algebraic residuals are relative to ``scale = 1 + sum |c| |C| |D|`` of the
    extension tensor.
    """
    A, g0 = realize_jordan(spec)
    fc = formal_curvature(spec)
    ext = extension_tensor(spec)
    n = spec.n
    scale = 1.0 + sum(abs(c) * np.linalg.norm(C) * np.linalg.norm(D) for c, C, D in ext.terms)
    scale *= 1.0 + np.linalg.norm(A)
    e_comm = e_skew = 0.0
    for X in _gl_basis(n):
        BX = ext(X)
        e_comm = max(e_comm, float(np.linalg.norm(A @ BX - ext(A @ X))))
        K = BX @ A - A @ BX
        e_skew = max(e_skew, float(np.linalg.norm(K + g_adjoint(K, g0))))
    e_split = 0.0
    for X in fc.rep.basis.elements:
        BX = ext(X)
        e_split = max(e_split, float(np.linalg.norm(fc.rep(X) + BX - g_adjoint(BX, g0))))
    metric = realize_metric(spec, ext)
    if points is None:
        points = sample_points(metric, n_points, seed)
    nabla = covariant_constancy_residual(metric, A, points)
    R0 = curvature_at(metric, np.zeros(n))
    curv = float(np.linalg.norm(R0.matrix - fc.rep.matrix))
    direct = curvature_from_second_derivatives(g0, metric.ddmetric())
    paths = float(np.linalg.norm(R0.matrix - direct.matrix))
    berger = berger_certificate(spec)
    report = {
        "spec": spec.to_json(),
        "commutes_residual": e_comm / scale,
        "skew_bracket_residual": e_skew / scale,
        "curvature_split_residual": e_split / scale,
        "nabla_A_residual": nabla,
        "curvature_residual": curv,
        "curvature_paths_residual": paths,
        "berger": berger,
        "g0_exact": bool(np.array_equal(metric.metric(np.zeros(n)), g0.matrix)),
    }
    checks = {
        "commutes": report["commutes_residual"] <= tol_alg,
        "skew_bracket": report["skew_bracket_residual"] <= tol_alg,
        "curvature_split": report["curvature_split_residual"] <= tol_alg,
        "nabla_A": nabla <= tol_nabla,
        "curvature": curv <= tol_curv,
        "curvature_paths": paths <= 1e-10,
        "berger": berger["verdict"] != "failed",
    }
    if fd_check:
        ddg_fd = fd_second_derivatives(metric.metric, np.zeros(n))
        fd = curvature_from_second_derivatives(g0, ddg_fd)
        report["fd_curvature_residual"] = float(np.linalg.norm(fd.matrix - fc.rep.matrix))
        checks["fd_curvature"] = report["fd_curvature_residual"] <= tol_fd
    report["checks"] = checks
    report["ok"] = all(checks.values())
    return report
