"""Dense matrix algebra relative to a nondegenerate symmetric bilinear form.

Everything here works with plain ``numpy`` arrays. The bilinear form ``g`` is
wrapped in :class:`BilinearForm` so that its inverse and signature are
computed once; matrices themselves are not wrapped; role checks
(g-symmetric / g-skew) are explicit functions.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

__all__ = [
    "AmbiguousStructureError",
    "BilinearForm",
    "JordanBlock",
    "JordanSpec",
    "MatrixPolynomial",
    "RoleError",
    "SoBasis",
    "commutator",
    "g_adjoint",
    "is_g_skew",
    "is_g_symmetric",
    "jordan_block",
    "krylov_rank",
    "minimal_polynomial",
    "realize_jordan",
    "skew_residual",
    "so_basis",
    "sym_residual",
    "trace_pairing",
    "wedge",
]

DEFAULT_ROLE_TOL = 1e-10
DEFAULT_KRYLOV_TOL = 1e-10
# relative Krylov residuals between the threshold and this value are treated
# as numerically ambiguous (clustered eigenvalues)
DEFAULT_KRYLOV_GRAY = 1e-6


class RoleError(ValueError):
    """A matrix does not have the g-symmetry / g-skewness an operation needs."""


class AmbiguousStructureError(ArithmeticError):
    """Numerical rank decision falls between the dependence and independence
    thresholds, so the algebraic structure cannot be decided reliably."""


@dataclass(frozen=True, eq=False)
class BilinearForm:
    """Nondegenerate symmetric bilinear form ``g`` on R^n."""

    matrix: np.ndarray
    det_tol: float = 1e-12
    inverse: np.ndarray = field(init=False, repr=False)
    signature: tuple[int, int] = field(init=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise ValueError(f"bilinear form must be a non-empty square matrix, got shape {m.shape}")
        scale = max(1.0, np.abs(m).max())
        if np.abs(m - m.T).max() > 1e-12 * scale:
            raise ValueError("bilinear form is not symmetric")
        if abs(np.linalg.det(m)) <= self.det_tol * scale ** m.shape[0]:
            raise ValueError("bilinear form is singular")
        m = 0.5 * (m + m.T)
        m.setflags(write=False)
        inv = np.linalg.inv(m)
        inv.setflags(write=False)
        ev = np.linalg.eigvalsh(m)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "inverse", inv)
        object.__setattr__(self, "signature", (int((ev > 0).sum()), int((ev < 0).sum())))

    @classmethod
    def identity(cls, n: int) -> "BilinearForm":
        return cls(np.eye(n))

    @classmethod
    def diagonal(cls, signs: Sequence[float]) -> "BilinearForm":
        return cls(np.diag(np.asarray(signs, dtype=float)))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, u, v) -> float:
        return float(np.asarray(u) @ self.matrix @ np.asarray(v))


def _as_form(g) -> BilinearForm:
    if isinstance(g, BilinearForm):
        return g
    return BilinearForm(np.asarray(g, dtype=float))


def g_adjoint(M, g) -> np.ndarray:
    """Return ``M* = g^{-1} M^T g``, the adjoint of ``M`` with respect to ``g``."""
    g = _as_form(g)
    return g.inverse @ np.asarray(M, dtype=float).T @ g.matrix


def sym_residual(M, g) -> float:
    """Relative g-symmetry defect ``|gM - M^T g| / (1 + |M|)``."""
    g = _as_form(g)
    M = np.asarray(M, dtype=float)
    gm = g.matrix @ M
    return float(np.linalg.norm(gm - gm.T) / (1.0 + np.linalg.norm(M)))


def skew_residual(M, g) -> float:
    """Relative g-skewness defect ``|gM + M^T g| / (1 + |M|)``."""
    g = _as_form(g)
    M = np.asarray(M, dtype=float)
    gm = g.matrix @ M
    return float(np.linalg.norm(gm + gm.T) / (1.0 + np.linalg.norm(M)))


def is_g_symmetric(M, g, tol: float = DEFAULT_ROLE_TOL) -> bool:
    return sym_residual(M, g) <= tol


def is_g_skew(M, g, tol: float = DEFAULT_ROLE_TOL) -> bool:
    return skew_residual(M, g) <= tol


def wedge(v, u, g) -> np.ndarray:
    """The g-skew operator ``v (g u)^T - u (g v)^T`` identified with ``v ^ u``."""
    g = _as_form(g)
    v = np.asarray(v, dtype=float)
    u = np.asarray(u, dtype=float)
    return np.outer(v, g.matrix @ u) - np.outer(u, g.matrix @ v)


def commutator(X, Y) -> np.ndarray:
    return X @ Y - Y @ X


def trace_pairing(X, Y) -> float:
    """Invariant form ``tr(XY)``."""
    return float(np.einsum("ij,ji->", X, Y))


@dataclass(frozen=True, eq=False)
class SoBasis:
    """Ordered basis ``wedge(e_i, e_j)``, ``i < j`` lexicographic, of so(g).

    Because ``wedge(v, u) = (v u^T - u v^T) g`` the coordinates of a g-skew
    matrix ``X`` are read off exactly from the strict upper triangle of
    ``X g^{-1}``.
    """

    form: BilinearForm
    pairs: tuple[tuple[int, int], ...]
    elements: np.ndarray  # (N, n, n)
    gram: np.ndarray  # (N, N) trace pairing

    @property
    def n(self) -> int:
        return self.form.n

    @property
    def dim(self) -> int:
        return len(self.pairs)

    def coords(self, X) -> np.ndarray:
        """Coordinates of a g-skew matrix (or a stack of them)."""
        X = np.asarray(X, dtype=float)
        Y = X @ self.form.inverse
        i, j = np.triu_indices(self.n, 1)
        return Y[..., i, j]

    def matrix(self, c) -> np.ndarray:
        """Inverse of :meth:`coords`."""
        c = np.asarray(c, dtype=float)
        return np.tensordot(c, self.elements, axes=([-1], [0]))

    def project(self, M) -> np.ndarray:
        """Trace-pairing orthogonal projection ``(M - M*)/2`` onto so(g)."""
        M = np.asarray(M, dtype=float)
        return 0.5 * (M - g_adjoint(M, self.form))


def so_basis(g) -> SoBasis:
    g = _as_form(g)
    n = g.n
    eye = np.eye(n)
    pairs = tuple((i, j) for i in range(n) for j in range(i + 1, n))
    if pairs:
        elements = np.array([wedge(eye[i], eye[j], g) for i, j in pairs])
    else:
        elements = np.zeros((0, n, n))
    gram = np.einsum("aij,bji->ab", elements, elements)
    elements.setflags(write=False)
    gram.setflags(write=False)
    return SoBasis(g, pairs, elements, gram)


class MatrixPolynomial:
    """Real polynomial ``a_0 + a_1 t + ... + a_d t^d`` evaluable on scalars and
    square matrices."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[float] = (0.0,)):
        c = np.array(list(coeffs) or [0.0], dtype=float)
        c = npoly.polytrim(c) if c.size else np.zeros(1)
        if c.size == 0:
            c = np.zeros(1)
        c.setflags(write=False)
        self.coeffs = c

    @classmethod
    def from_roots(cls, roots: Iterable[float]) -> "MatrixPolynomial":
        roots = list(roots)
        if not roots:
            return cls([1.0])
        return cls(npoly.polyfromroots(roots))

    @property
    def degree(self) -> int:
        """Degree; the zero polynomial has degree -1."""
        if self.is_zero():
            return -1
        return self.coeffs.size - 1

    def is_zero(self) -> bool:
        return self.coeffs.size == 1 and self.coeffs[0] == 0.0

    def derivative(self) -> "MatrixPolynomial":
        return MatrixPolynomial(npoly.polyder(self.coeffs))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if t.ndim == 2:
            if t.shape[0] != t.shape[1]:
                raise ValueError("matrix argument must be square")
            out = np.zeros_like(t)
            eye = np.eye(t.shape[0])
            for a in self.coeffs[::-1]:  # Horner
                out = out @ t + a * eye
            return out
        return npoly.polyval(t, self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, MatrixPolynomial):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    def __repr__(self):
        return f"MatrixPolynomial({self.coeffs.tolist()})"

    def allclose(self, other: "MatrixPolynomial", atol: float = 1e-10) -> bool:
        a, b = self.coeffs, other.coeffs
        m = max(a.size, b.size)
        return np.allclose(np.pad(a, (0, m - a.size)), np.pad(b, (0, m - b.size)), atol=atol, rtol=0)


def krylov_rank(A, tol: float = DEFAULT_KRYLOV_TOL) -> int:
    """Rank of ``span{I, A, ..., A^n}`` via singular values (oracle helper)."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    powers = [np.eye(n)]
    for _ in range(n):
        powers.append(powers[-1] @ A)
    K = np.array([P.ravel() / np.linalg.norm(P) if np.linalg.norm(P) > 0 else P.ravel() for P in powers])
    s = np.linalg.svd(K, compute_uv=False)
    return int((s > tol * s[0]).sum())


def minimal_polynomial(A, tol: float = DEFAULT_KRYLOV_TOL, gray: float = DEFAULT_KRYLOV_GRAY) -> MatrixPolynomial:
    """Monic minimal polynomial of ``A`` from the Krylov sequence ``I, A, A^2, ...``.

    ``A^k`` is declared dependent on the lower powers when its normalized
    distance to their span is below ``tol``. Distances between ``tol`` and
    ``gray`` mean the eigenvalues are clustered too tightly to decide, and
    raise :class:`AmbiguousStructureError`.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("minimal_polynomial needs a square matrix")
    n = A.shape[0]
    s = max(1.0, np.linalg.norm(A, 2))
    As = A / s
    vecs = [np.eye(n).ravel()]
    P = np.eye(n)
    for k in range(1, n + 1):
        P = P @ As
        K = np.array(vecs).T
        v = P.ravel()
        Q, _ = np.linalg.qr(K)
        resid = v - Q @ (Q.T @ v)
        rel = np.linalg.norm(resid) / max(np.linalg.norm(v), np.finfo(float).tiny)
        if np.linalg.norm(v) == 0.0 or rel < tol:
            c, *_ = np.linalg.lstsq(K, v, rcond=None)
            # monic q(t) for A/s, then p(t) = s^k q(t/s)
            q = np.concatenate([-c, [1.0]])
            p = q * s ** (k - np.arange(k + 1))
            return MatrixPolynomial(p)
        if rel < gray:
            raise AmbiguousStructureError(
                f"Krylov residual {rel:.3e} of A^{k} lies between {tol:g} and {gray:g}; "
                "eigenvalue clustering is ambiguous at this tolerance"
            )
        vecs.append(v)
    raise AssertionError("Cayley-Hamilton violated")  # pragma: no cover


# ---------------------------------------------------------------- Jordan specs


@dataclass(frozen=True)
class JordanBlock:
    eigenvalue: float
    size: int
    sign: int = 1

    def __post_init__(self):
        if int(self.size) != self.size or self.size < 1:
            raise ValueError(f"Jordan block size must be a positive integer, got {self.size}")
        if self.sign not in (1, -1):
            raise ValueError(f"block sign must be +1 or -1, got {self.sign}")
        if not np.isfinite(self.eigenvalue):
            raise ValueError("eigenvalue must be finite")


@dataclass(frozen=True)
class JordanSpec:
    """Real Jordan structure with per-block sign of the adapted form.

    Blocks are realized in the order listed. Complex eigenvalues are not
    supported.
    """

    blocks: tuple[JordanBlock, ...]

    def __post_init__(self):
        blocks = tuple(b if isinstance(b, JordanBlock) else JordanBlock(*b) for b in self.blocks)
        if not blocks:
            raise ValueError("JordanSpec needs at least one block")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def diagonal(cls, eigenvalues: Sequence[float], signs: Sequence[int] | None = None) -> "JordanSpec":
        signs = signs or [1] * len(eigenvalues)
        return cls(tuple(JordanBlock(float(l), 1, int(s)) for l, s in zip(eigenvalues, signs)))

    @classmethod
    def from_json(cls, data) -> "JordanSpec":
        if isinstance(data, str):
            data = json.loads(data)
        order = data.get("order", "as-listed")
        if order != "as-listed":
            raise ValueError(f"unsupported block order {order!r}")
        return cls(tuple(JordanBlock(float(b["lambda"]), int(b["size"]), int(b.get("sign", 1)))
                         for b in data["blocks"]))

    def to_json(self) -> dict:
        return {"blocks": [{"lambda": b.eigenvalue, "size": b.size, "sign": b.sign} for b in self.blocks],
                "order": "as-listed"}

    @property
    def n(self) -> int:
        return sum(b.size for b in self.blocks)

    @property
    def offsets(self) -> list[int]:
        return list(np.cumsum([0] + [b.size for b in self.blocks[:-1]]))

    def block_indices(self, alpha: int) -> np.ndarray:
        o = self.offsets[alpha]
        return np.arange(o, o + self.blocks[alpha].size)

    def eigenvalues(self) -> list[float]:
        """Distinct eigenvalues in order of first appearance."""
        out: list[float] = []
        for b in self.blocks:
            if b.eigenvalue not in out:
                out.append(b.eigenvalue)
        return out

    def max_block(self, lam: float) -> int:
        return max(b.size for b in self.blocks if b.eigenvalue == lam)

    def blocks_per_eigenvalue(self) -> dict[float, int]:
        out: dict[float, int] = {}
        for b in self.blocks:
            out[b.eigenvalue] = out.get(b.eigenvalue, 0) + 1
        return out

    def minimal_polynomial(self, which: Sequence[int] | None = None) -> MatrixPolynomial:
        """Exact minimal polynomial of A restricted to the listed blocks."""
        blocks = self.blocks if which is None else [self.blocks[a] for a in which]
        sizes: dict[float, int] = {}
        for b in blocks:
            sizes[b.eigenvalue] = max(sizes.get(b.eigenvalue, 0), b.size)
        roots = [lam for lam, k in sizes.items() for _ in range(k)]
        return MatrixPolynomial.from_roots(roots)

    def is_regular(self) -> bool:
        return all(c == 1 for c in self.blocks_per_eigenvalue().values())


def jordan_block(lam: float, k: int) -> np.ndarray:
    return lam * np.eye(k) + np.eye(k, k=1)


def realize_jordan(spec: JordanSpec) -> tuple[np.ndarray, BilinearForm]:
    """Build ``A`` in Jordan form and an adapted form ``g`` with ``gA = A^T g``.

    Each block ``J_k(lambda)`` is paired with ``sign * (exchange matrix)``;
    the exchange matrix ``P`` satisfies ``P J = J^T P`` exactly.
    """
    n = spec.n
    A = np.zeros((n, n))
    G = np.zeros((n, n))
    for alpha, b in enumerate(spec.blocks):
        idx = spec.block_indices(alpha)
        sl = slice(idx[0], idx[-1] + 1)
        A[sl, sl] = jordan_block(b.eigenvalue, b.size)
        G[sl, sl] = b.sign * np.fliplr(np.eye(b.size))
    return A, BilinearForm(G)
