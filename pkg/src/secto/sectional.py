"""Sectional operators on so(g): construction, identities and spectra.

A sectional operator for a pair ``A, B`` of g-symmetric matrices is a
trace-symmetric linear map ``R`` on so(g) with ``[R(X), A] = [X, B]``. The
canonical solution for ``B = p(A)`` is the directional derivative

    R0(X) = d/dt p(A + tX) |_{t=0} = sum_m a_m sum_j A^(m-1-j) X A^j.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .linalg import (
    AmbiguousStructureError,
    BilinearForm,
    JordanSpec,
    MatrixPolynomial,
    RoleError,
    SoBasis,
    _as_form,
    commutator,
    skew_residual,
    so_basis,
    sym_residual,
    wedge,
)

__all__ = [
    "CentralizerBasis",
    "InconsistentSystemError",
    "InvariantSplit",
    "NotPolynomialError",
    "SectionalRep",
    "UniquenessVerdict",
    "apply_r0",
    "bianchi_residual",
    "build_rep",
    "centralizer",
    "eigen_clusters",
    "express_polynomial",
    "invariant_split",
    "joint_sectional_family",
    "r0_terms",
    "sectional_residual",
    "solution_space",
    "spectrum_predict",
    "spectrum_verify",
    "uniqueness_test",
]

NULL_RCOND = 1e-10


class NotPolynomialError(ValueError):
    """``B`` is not a polynomial in ``A`` (so no sectional operator exists)."""


class InconsistentSystemError(ValueError):
    """The stacked sectional identities admit no common solution."""


# ------------------------------------------------------------------ operators


@dataclass(frozen=True, eq=False)
class SectionalRep:
    """Linear operator on so(g) stored as an ``N x N`` matrix in the
    lexicographic wedge basis; column ``k`` holds the image of basis element
    ``k``."""

    matrix: np.ndarray
    basis: SoBasis
    provenance: dict = field(default_factory=lambda: {"source": "user-supplied"})

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.shape != (self.basis.dim, self.basis.dim):
            raise ValueError(f"operator matrix must be {self.basis.dim}x{self.basis.dim}, got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def form(self) -> BilinearForm:
        return self.basis.form

    def __call__(self, X) -> np.ndarray:
        return self.basis.matrix(self.matrix @ self.basis.coords(X))

    def symmetry_residual(self) -> float:
        """``|G R - (G R)^T| / (1 + |G||R|)``; zero iff trace-symmetric."""
        GR = self.basis.gram @ self.matrix
        return float(np.linalg.norm(GR - GR.T) / (1.0 + np.linalg.norm(self.basis.gram) * np.linalg.norm(self.matrix)))

    def to_json(self) -> dict:
        return {"n": self.basis.n, "basis": "lex-wedge", "matrix": self.matrix.tolist()}

    @classmethod
    def from_json(cls, data, g) -> "SectionalRep":
        if data.get("basis", "lex-wedge") != "lex-wedge":
            raise ValueError("only the lex-wedge basis is supported")
        basis = so_basis(g)
        if int(data["n"]) != basis.n:
            raise ValueError(f"operator is for n={data['n']} but the form has n={basis.n}")
        return cls(np.asarray(data["matrix"], dtype=float), basis)

    @classmethod
    def identity(cls, g, k: float = 1.0) -> "SectionalRep":
        b = g if isinstance(g, SoBasis) else so_basis(g)
        return cls(k * np.eye(b.dim), b, {"source": "scalar", "k": k})


def _check_roles(A, g, X=None):
    if sym_residual(A, g) > 1e-10:
        raise RoleError("A must be g-symmetric")
    if X is not None and skew_residual(X, g) > 1e-10:
        raise RoleError("X must be g-skew")


def _powers(A, d):
    P = [np.eye(A.shape[0])]
    for _ in range(d):
        P.append(P[-1] @ A)
    return P


def r0_terms(A, p: MatrixPolynomial) -> list[tuple[float, np.ndarray, np.ndarray]]:
    """``(a_m, A^(m-1-j), A^j)`` triples making up the derivative expansion."""
    A = np.asarray(A, dtype=float)
    P = _powers(A, max(p.degree, 0))
    terms = []
    for m, a in enumerate(p.coeffs):
        if a == 0.0 or m == 0:
            continue
        for j in range(m):
            terms.append((float(a), P[m - 1 - j], P[j]))
    return terms


def apply_r0(A, p: MatrixPolynomial, X, g=None) -> np.ndarray:
    """``R0(X) = sum_m a_m sum_j A^(m-1-j) X A^j``.

    If ``g`` is given the g-symmetry of ``A`` and g-skewness of ``X`` are
    checked first.
    """
    A = np.asarray(A, dtype=float)
    X = np.asarray(X, dtype=float)
    if g is not None:
        _check_roles(A, g, X)
    out = np.zeros_like(X)
    for a, C, D in r0_terms(A, p):
        out += a * (C @ X @ D)
    return out


def build_rep(A, p: MatrixPolynomial, g) -> SectionalRep:
    g = _as_form(g)
    _check_roles(A, g)
    basis = so_basis(g)
    terms = r0_terms(A, p)
    E = basis.elements
    images = np.zeros_like(E)
    for a, C, D in terms:
        images += a * np.einsum("ij,kjl,lm->kim", C, E, D)
    R = basis.coords(images).T if basis.dim else np.zeros((0, 0))
    return SectionalRep(R, basis, {"source": "R0", "A": np.asarray(A).tolist(), "p": p.coeffs.tolist()})


def _scale(*mats) -> float:
    return 1.0 + sum(float(np.linalg.norm(M)) for M in mats)


def sectional_residual(R: SectionalRep, A, B) -> float:
    """``max_X |[R(X), A] - [X, B]| / (1 + |A| + |B|)`` over the wedge basis."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    worst = 0.0
    for X in R.basis.elements:
        D = commutator(R(X), A) - commutator(X, B)
        worst = max(worst, float(np.linalg.norm(D)))
    return worst / _scale(A, B)


def bianchi_residual(R: SectionalRep, triples=None, n_random: int = 200, seed: int = 0) -> float:
    """Worst normalized cyclic sum ``R(u^v)w + R(v^w)u + R(w^u)v``.

    Default triples: every ordered basis triple ``(e_i, e_j, e_k)``, ``i<j<k``,
    plus ``n_random`` seeded random unit-scale triples.
    """
    g = R.form
    n = g.n
    if triples is None:
        eye = np.eye(n)
        triples = [(eye[i], eye[j], eye[k]) for i in range(n) for j in range(i + 1, n) for k in range(j + 1, n)]
        rng = np.random.default_rng(seed)
        triples += [tuple(rng.uniform(-1, 1, (3, n))) for _ in range(n_random)]
    norm_R = max(1.0, np.linalg.norm(R.matrix, 2)) if R.matrix.size else 1.0
    worst = 0.0
    for u, v, w in triples:
        u, v, w = (np.asarray(z, dtype=float) for z in (u, v, w))
        s = R(wedge(u, v, g)) @ w + R(wedge(v, w, g)) @ u + R(wedge(w, u, g)) @ v
        denom = norm_R * np.linalg.norm(u) * np.linalg.norm(v) * np.linalg.norm(w)
        if denom > 0:
            worst = max(worst, float(np.linalg.norm(s) / denom))
    return worst


# ------------------------------------------------------------------ centralizer


@dataclass(frozen=True, eq=False)
class CentralizerBasis:
    """Orthonormal (in wedge coordinates) basis of ``g_A = {Y in so(g): [Y, A] = 0}``."""

    coords: np.ndarray  # (N, d)
    basis: SoBasis

    @property
    def dim(self) -> int:
        return self.coords.shape[1]

    @property
    def elements(self) -> np.ndarray:
        return self.basis.matrix(self.coords.T)

    def distance(self, c) -> float:
        """Distance of a coordinate vector from the span."""
        c = np.asarray(c, dtype=float)
        return float(np.linalg.norm(c - self.coords @ (self.coords.T @ c)))


def _null_space(M, rcond=NULL_RCOND) -> np.ndarray:
    if M.size == 0:
        return np.eye(M.shape[1])
    return scipy.linalg.null_space(M, rcond=rcond)


def _fix_signs(Q):
    for k in range(Q.shape[1]):
        nz = np.flatnonzero(np.abs(Q[:, k]) > 1e-12)
        if nz.size and Q[nz[0], k] < 0:
            Q[:, k] = -Q[:, k]
    return Q


def _adjoint_map(A, basis: SoBasis) -> np.ndarray:
    """``n^2 x N`` matrix of ``X -> [X, A]`` on the wedge basis."""
    return np.array([commutator(E, A).ravel() for E in basis.elements]).T.reshape(A.shape[0] ** 2, basis.dim)


def centralizer(A, g, rcond: float = NULL_RCOND) -> CentralizerBasis:
    g = _as_form(g)
    A = np.asarray(A, dtype=float)
    _check_roles(A, g)
    basis = so_basis(g)
    if basis.dim == 0:
        return CentralizerBasis(np.zeros((0, 0)), basis)
    M = _adjoint_map(A, basis)
    # column scaling keeps the cutoff relative to the basis normalization
    Q = _null_space(M / max(1.0, np.linalg.norm(A)), rcond)
    return CentralizerBasis(_fix_signs(Q), basis)


def _symmetric_dim_in(cent: CentralizerBasis, rcond=NULL_RCOND) -> int:
    """Dimension of trace-symmetric operators on so(g) with image in g_A."""
    C = cent.coords
    N, d = C.shape
    if d == 0:
        return 0
    G = cent.basis.gram
    # R = C K, K is d x N; require G C K symmetric
    GC = G @ C
    rows = []
    for a in range(d):
        for b in range(N):
            K = np.zeros((d, N))
            K[a, b] = 1.0
            S = GC @ K
            rows.append((S - S.T)[np.triu_indices(N, 1)])
    M = np.array(rows).T
    return int(_null_space(M, rcond).shape[1])


# ------------------------------------------------------------------ polynomials


def express_polynomial(A, B, tol: float = 1e-9) -> MatrixPolynomial:
    """Least-degree ``p`` with ``p(A) = B``; minimum-norm coefficients.

    Raises :class:`NotPolynomialError` when ``A`` and ``B`` do not commute
    or when ``B`` is outside the span of the powers of ``A``.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    n = A.shape[0]
    nb = float(np.linalg.norm(B))
    if np.linalg.norm(commutator(A, B)) > tol * (1.0 + np.linalg.norm(A)) * (1.0 + nb):
        raise NotPolynomialError("A and B are not commuting")
    if nb == 0.0:
        return MatrixPolynomial([0.0])
    s = max(1.0, np.linalg.norm(A, 2))
    As = A / s
    cols = [np.eye(n).ravel()]
    P = np.eye(n)
    for d in range(n):
        K = np.array(cols).T
        c, *_ = np.linalg.lstsq(K, B.ravel(), rcond=None)
        if np.linalg.norm(K @ c - B.ravel()) <= tol * (1.0 + nb):
            return MatrixPolynomial(c / s ** np.arange(c.size))
        P = P @ As
        cols.append(P.ravel())
    raise NotPolynomialError("B is not a polynomial in A")


# ------------------------------------------------------------------ solutions


def solution_space(A, B, g) -> tuple[SectionalRep, int]:
    """Particular solution ``R0`` and dimension of the homogeneous freedom
    (trace-symmetric operators with image in ``g_A``)."""
    g = _as_form(g)
    try:
        p = express_polynomial(A, B)
    except NotPolynomialError as exc:
        raise NotPolynomialError(f"not sectional-compatible: {exc}") from exc
    R0 = build_rep(A, p, g)
    return R0, _symmetric_dim_in(centralizer(A, g))


# ------------------------------------------------------------------ spectrum


def spectrum_predict(eigenvalues, p: MatrixPolynomial, nontrivial=()) -> list[float]:
    """Divided differences over distinct eigenvalue pairs plus ``p'(lambda)``
    for the eigenvalues carrying a non-scalar block.

    ``eigenvalues`` may also be a :class:`JordanSpec`, in which case
    ``nontrivial`` is read from it.
    """
    if isinstance(eigenvalues, JordanSpec):
        spec = eigenvalues
        eigenvalues = spec.eigenvalues()
        nontrivial = [lam for lam in eigenvalues if spec.max_block(lam) >= 2]
    lams = list(eigenvalues)
    out = []
    for i in range(len(lams)):
        for j in range(i + 1, len(lams)):
            li, lj = lams[i], lams[j]
            out.append(float((p(li) - p(lj)) / (li - lj)))
    dp = p.derivative()
    out += [float(dp(lam)) for lam in lams if lam in set(nontrivial)]
    return sorted(out)


def eigen_clusters(values, tol: float) -> list[tuple[complex, int]]:
    """Group numerically computed eigenvalues; returns ``(mean, count)``.

    The mean of a cluster coming from a defective eigenvalue is accurate to
    roundoff even though the members are spread by ``eps**(1/k)``.
    """
    vals = sorted(np.asarray(values, dtype=complex), key=lambda z: (z.real, z.imag))
    clusters: list[list[complex]] = []
    for z in vals:
        for c in clusters:
            if abs(z - np.mean(c)) <= tol:
                c.append(z)
                break
        else:
            clusters.append([z])
    return [(complex(np.mean(c)), len(c)) for c in clusters]


@dataclass
class InvariantSplit:
    """Blocks ``m_ij`` (``i <= j``) of so(g) induced by the generalized
    eigenspaces of ``A``."""

    pairs: list[tuple[int, int]]
    bases: list[np.ndarray]  # coordinate bases, (N, dim_ij)
    predicted: list[float | None]
    eigenvalues: list[float]


def _generalized_eigenspaces(A, eigenvalues, rank_tol=1e-8):
    n = A.shape[0]
    spaces = []
    for lam in eigenvalues:
        M = np.linalg.matrix_power(A - lam * np.eye(n), n)
        spaces.append(_null_space(M / max(1.0, np.linalg.norm(M)), rank_tol))
    dims = sum(S.shape[1] for S in spaces)
    if dims != n:
        raise AmbiguousStructureError(f"generalized eigenspaces have total dimension {dims}, expected {n}")
    return spaces


def _distinct_eigenvalues(A, cluster_tol):
    ev = np.linalg.eigvals(A)
    if np.abs(ev.imag).max(initial=0.0) > cluster_tol:
        raise ValueError("complex eigenvalues are not supported")
    clusters = eigen_clusters(ev.real, cluster_tol)
    means = [c.real for c, _ in clusters]
    gaps = np.diff(sorted(means))
    if gaps.size and gaps.min() < 10 * cluster_tol:
        raise AmbiguousStructureError("eigenvalue clusters are not separated at the requested tolerance")
    return means


def invariant_split(A, g, p: MatrixPolynomial, spec: JordanSpec | None = None,
                    cluster_tol: float = 1e-6) -> InvariantSplit:
    g = _as_form(g)
    A = np.asarray(A, dtype=float)
    basis = so_basis(g)
    if spec is not None:
        lams = spec.eigenvalues()
        eye = np.eye(g.n)
        spaces = []
        for lam in lams:
            idx = [i for a, b in enumerate(spec.blocks) if b.eigenvalue == lam for i in spec.block_indices(a)]
            spaces.append(eye[:, idx])
        nontrivial = {lam for lam in lams if spec.max_block(lam) >= 2}
    else:
        lams = _distinct_eigenvalues(A, cluster_tol)
        spaces = _generalized_eigenspaces(A, lams)
        nontrivial = set()
        for lam, S in zip(lams, spaces):
            Ai = (A - lam * np.eye(g.n)) @ S
            if np.linalg.norm(Ai) > 1e-8 * (1.0 + np.linalg.norm(A)):
                nontrivial.add(lam)
    dp = p.derivative()
    pairs, bases, predicted = [], [], []
    for i, Si in enumerate(spaces):
        for j in range(i, len(spaces)):
            Sj = spaces[j]
            vecs = []
            if i == j:
                for a in range(Si.shape[1]):
                    for b in range(a + 1, Si.shape[1]):
                        vecs.append(basis.coords(wedge(Si[:, a], Si[:, b], g)))
            else:
                for a in range(Si.shape[1]):
                    for b in range(Sj.shape[1]):
                        vecs.append(basis.coords(wedge(Si[:, a], Sj[:, b], g)))
            if not vecs:
                continue
            Q = scipy.linalg.orth(np.array(vecs).T)
            pairs.append((i, j))
            bases.append(Q)
            if i == j:
                predicted.append(float(dp(lams[i])) if lams[i] in nontrivial else None)
            else:
                predicted.append(float((p(lams[i]) - p(lams[j])) / (lams[i] - lams[j])))
    return InvariantSplit(pairs, bases, predicted, list(lams))


def spectrum_verify(A, p: MatrixPolynomial, g, spec: JordanSpec | None = None,
                    tol: float = 1e-8, cluster_tol: float = 1e-5) -> dict:
    """Check the predicted eigenvalues against the dense spectrum of ``R0``.

    Returns a report dict with the dense spectrum (cluster means and
    multiplicities), per-value mismatch, and per-block invariance and
    single-eigenvalue residuals of the split.
    """
    g = _as_form(g)
    A = np.asarray(A, dtype=float)
    R = build_rep(A, p, g)
    split = invariant_split(A, g, p, spec)
    if spec is not None:
        predicted = spectrum_predict(spec, p)
    else:
        nontriv = [v for (i, j), v in zip(split.pairs, split.predicted) if i == j and v is not None]
        predicted = sorted([v for (i, j), v in zip(split.pairs, split.predicted) if i != j] + nontriv)
    scale = 1.0 + np.linalg.norm(R.matrix, 2) if R.matrix.size else 1.0
    dense = np.linalg.eigvals(R.matrix) if R.matrix.size else np.zeros(0)
    clusters = eigen_clusters(dense, cluster_tol * scale)
    matches = []
    for mu in predicted:
        err = min((abs(c - mu) for c, _ in clusters), default=np.inf)
        matches.append({"predicted": mu, "error": float(err), "ok": bool(err <= tol * scale)})
    blocks = []
    for (i, j), Q, mu in zip(split.pairs, split.bases, split.predicted):
        RQ = R.matrix @ Q
        inv_res = float(np.linalg.norm(RQ - Q @ (Q.T @ RQ)) / scale)
        Rij = Q.T @ RQ
        ev = eigen_clusters(np.linalg.eigvals(Rij), cluster_tol * scale)
        entry = {"pair": [i, j], "dim": Q.shape[1], "invariance_residual": inv_res,
                 "eigenvalues": [c.real for c, _ in ev], "predicted": mu}
        if mu is not None:
            # restriction must carry the single predicted eigenvalue
            entry["single_eigenvalue_error"] = float(max(abs(c - mu) for c, _ in ev) / scale)
        blocks.append(entry)
    ok = all(m["ok"] for m in matches) and all(
        b["invariance_residual"] <= tol and b.get("single_eigenvalue_error", 0.0) <= tol for b in blocks)
    return {
        "predicted": predicted,
        "dense_clusters": [{"value": c.real, "imag": c.imag, "multiplicity": k} for c, k in clusters],
        "matches": matches,
        "split": blocks,
        "ok": bool(ok),
    }


# ------------------------------------------------------------------ uniqueness


@dataclass
class UniquenessVerdict:
    dimension: int
    particular: SectionalRep
    residual: float
    fitted_k: float | None = None
    scalar_residual: float | None = None
    certified_scalar: bool = False
    null_basis: np.ndarray | None = None


def _sectional_rows(A, B, basis: SoBasis):
    """Linear system ``M vec(R) = rhs`` for ``[R(X_k), A] = [X_k, B]``.

    ``R`` is vectorized column-major (``vec(R)[k*N + l] = R[l, k]``).
    """
    N = basis.dim
    MA = _adjoint_map(A, basis)
    M = np.kron(np.eye(N), MA)
    rhs = np.concatenate([commutator(E, B).ravel() for E in basis.elements])
    return M, rhs


def _symmetry_rows(basis: SoBasis):
    N = basis.dim
    G = basis.gram
    rows = []
    iu = np.triu_indices(N, 1)
    for a, b in zip(*iu):
        # (G R)[a, b] - (G R)[b, a] = sum_l G[a,l] R[l,b] - G[b,l] R[l,a]
        r = np.zeros((N, N))  # indexed [l, col]
        r[:, b] += G[a, :]
        r[:, a] -= G[b, :]
        rows.append(r.T.ravel())
    return np.array(rows).reshape(-1, N * N)


def _solve_stacked(pairs, g, rcond=NULL_RCOND):
    basis = so_basis(g)
    N = basis.dim
    blocks, rhs = [_symmetry_rows(basis)], [np.zeros(N * (N - 1) // 2)]
    scale = 1.0
    for A, B in pairs:
        s = 1.0 + np.linalg.norm(A) + np.linalg.norm(B)
        M, r = _sectional_rows(np.asarray(A, float), np.asarray(B, float), basis)
        blocks.append(M / s)
        rhs.append(r / s)
        scale = max(scale, s)
    M = np.vstack(blocks)
    rhs = np.concatenate(rhs)
    x, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    resid = float(np.linalg.norm(M @ x - rhs))
    Z = _null_space(M, rcond)
    return basis, x.reshape(N, N).T, resid, Z


def uniqueness_test(A, B, A2, B2, g, tol: float = 1e-9) -> UniquenessVerdict:
    """Solve both sectional identities at once.

    ``dimension`` is the dimension of the affine solution set. When ``A`` is
    regular and ``A2`` is not in ``span{A, I}`` the solution is certified to
    be a multiple of the identity (within ``tol``).
    """
    g = _as_form(g)
    for M in (A, B, A2, B2):
        _check_roles(M, g)
    basis, R, resid, Z = _solve_stacked([(A, B), (A2, B2)], g)
    if resid > tol:
        raise InconsistentSystemError(f"no common sectional operator (least-squares residual {resid:.3e})")
    rep = SectionalRep(R, basis, {"source": "joint-solve"})
    verdict = UniquenessVerdict(int(Z.shape[1]), rep, resid, null_basis=Z)
    n = g.n
    I = np.eye(n)
    span = np.array([np.asarray(A, float).ravel(), I.ravel()]).T
    c, *_ = np.linalg.lstsq(span, np.asarray(A2, float).ravel(), rcond=None)
    independent = np.linalg.norm(span @ c - np.asarray(A2, float).ravel()) > 1e-8 * (1 + np.linalg.norm(A2))
    regular = centralizer(A, g).dim == 0
    if basis.dim:
        k = float(np.trace(R) / basis.dim)
        verdict.fitted_k = k
        verdict.scalar_residual = float(np.linalg.norm(R - k * np.eye(basis.dim)))
        verdict.certified_scalar = bool(regular and independent and verdict.dimension == 0
                                        and verdict.scalar_residual <= tol)
    return verdict


def joint_sectional_family(A, A2, g) -> tuple[int, bool]:
    """Operators ``R`` sectional for ``(A, B)`` and ``(A2, B2)`` with ``B, B2``
    left free in Sym(g).

    Returns ``(dim, contains_identity)`` for the space of such ``R``; for
    regular ``A`` and ``A2`` outside ``span{A, I}`` this is the line through
    the identity.
    """
    g = _as_form(g)
    basis = so_basis(g)
    n, N = g.n, basis.dim
    # Sym(g) basis: g^{-1} S, S symmetric
    sym = []
    for i in range(n):
        for j in range(i, n):
            S = np.zeros((n, n))
            S[i, j] = S[j, i] = 1.0
            sym.append(g.inverse @ S)
    m = len(sym)
    blocks = []
    for A_ in (np.asarray(A, float), np.asarray(A2, float)):
        MR, _ = _sectional_rows(A_, np.zeros_like(A_), basis)
        # minus [X_k, B] with B = sum b_s Sym_s
        MB = np.zeros((N * n * n, m))
        for s, Sm in enumerate(sym):
            MB[:, s] = -np.concatenate([commutator(E, Sm).ravel() for E in basis.elements])
        blocks.append((MR, MB))
    sym_rows = _symmetry_rows(basis)
    top = np.hstack([sym_rows, np.zeros((sym_rows.shape[0], 2 * m))])
    r1 = np.hstack([blocks[0][0], blocks[0][1], np.zeros_like(blocks[0][1])])
    r2 = np.hstack([blocks[1][0], np.zeros_like(blocks[1][1]), blocks[1][1]])
    Z = _null_space(np.vstack([top, r1, r2]))
    ZR = Z[: N * N]
    # dimension of the projection onto the R-component
    if ZR.size == 0:
        return 0, False
    s = np.linalg.svd(ZR, compute_uv=False)
    dim = int((s > 1e-8 * max(1.0, s[0])).sum())
    idv = np.eye(N).T.ravel()
    Q = scipy.linalg.orth(ZR)
    contains = bool(np.linalg.norm(idv - Q @ (Q.T @ idv)) <= 1e-8 * np.linalg.norm(idv))
    return dim, contains
