"""Euler equation ``x' = [R(x), x]`` on so(g) and its shift integrals.

For a sectional ``R`` the coefficients of ``lambda^m`` in ``tr((x + lambda A)^k)``
are first integrals in involution. They are evaluated exactly by expanding
the matrix polynomial ``(x + lambda A)^k`` coefficient by coefficient.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .linalg import SoBasis, _as_form, commutator, skew_residual, so_basis, trace_pairing
from .sectional import SectionalRep

__all__ = [
    "FlowResult",
    "NonFiniteStateError",
    "euler_rhs",
    "fd_gradient",
    "hamiltonian",
    "integral_gradient",
    "integral_indices",
    "integrate",
    "lax_residual",
    "poisson_bracket",
    "rk4_step",
    "shift_integrals",
]


class NonFiniteStateError(FloatingPointError):
    def __init__(self, step: int):
        super().__init__(f"state became non-finite at step {step}")
        self.step = step


def euler_rhs(x, R: SectionalRep) -> np.ndarray:
    return commutator(R(x), x)


def hamiltonian(x, R: SectionalRep) -> float:
    return 0.5 * trace_pairing(R(x), x)


def _dense_map(R: SectionalRep) -> np.ndarray:
    """``R`` as an ``n^2 x n^2`` matrix acting on row-major flattened matrices."""
    b = R.basis
    n = b.n
    eye = np.eye(n * n).reshape(n * n, n, n)
    coords = b.coords(eye)  # (n^2, N): coordinate functional of each unit matrix
    E = b.elements.reshape(b.dim, n * n)
    return (coords @ R.matrix.T @ E).T


def rk4_step(x, R, h: float) -> np.ndarray:
    """One classical RK4 step; ``R`` may be a :class:`SectionalRep` or the
    dense map returned by ``_dense_map``."""
    if isinstance(R, SectionalRep):
        R = _dense_map(R)
    n = x.shape[0]

    def f(y):
        Ry = (R @ y.ravel()).reshape(n, n)
        return Ry @ y - y @ Ry

    k1 = f(x)
    k2 = f(x + 0.5 * h * k1)
    k3 = f(x + 0.5 * h * k2)
    k4 = f(x + h * k3)
    return x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def _shift_powers(x, A, k):
    """Coefficient matrices ``C[m]`` of ``(x + lambda A)^k = sum_m C[m] lambda^m``."""
    n = x.shape[0]
    C = [np.eye(n)]
    for _ in range(k):
        new = [c @ x for c in C] + [np.zeros((n, n))]
        for m, c in enumerate(C):
            new[m + 1] = new[m + 1] + c @ A
        C = new
    return C


def integral_indices(n: int, kmax: int | None = None) -> list[tuple[int, int]]:
    kmax = n if kmax is None else kmax
    return [(k, m) for k in range(2, kmax + 1) for m in range(k + 1)]


def shift_integrals(x, A, kmax: int | None = None) -> dict[tuple[int, int], float]:
    """``{(k, m): coefficient of lambda^m in tr((x + lambda A)^k)}`` for ``2 <= k <= kmax``."""
    x = np.asarray(x, dtype=float)
    A = np.asarray(A, dtype=float)
    kmax = x.shape[0] if kmax is None else kmax
    out = {}
    C = [np.eye(x.shape[0])]
    for k in range(1, kmax + 1):
        new = [c @ x for c in C] + [np.zeros_like(x)]
        for m, c in enumerate(C):
            new[m + 1] = new[m + 1] + c @ A
        C = new
        if k >= 2:
            for m in range(k + 1):
                out[(k, m)] = float(np.trace(C[m]))
    return out


def integral_gradient(x, A, idx: tuple[int, int], basis: SoBasis) -> np.ndarray:
    """Gradient in so(g) of the shift integral ``idx`` w.r.t. the trace pairing.

    ``d/ds tr((x + sY + lambda A)^k) = k tr((x + lambda A)^(k-1) Y)``, so the
    gl-gradient is ``k`` times the ``lambda^m`` coefficient of
    ``(x + lambda A)^(k-1)``; it is then projected onto so(g).
    """
    return basis.project(_gl_gradient(x, A, idx))


def _gl_gradient(x, A, idx):
    k, m = idx
    if m > k - 1:
        return np.zeros_like(np.asarray(x, float))
    return k * _shift_powers(np.asarray(x, float), np.asarray(A, float), k - 1)[m]


def fd_gradient(f, x, basis: SoBasis, h: float = 1e-6) -> np.ndarray:
    """Central-difference trace-pairing gradient of ``f`` on so(g)."""
    c0 = basis.coords(x)
    scale = max(1.0, float(np.abs(c0).max(initial=0.0)))
    step = h * scale
    df = np.zeros(basis.dim)
    for i in range(basis.dim):
        e = np.zeros(basis.dim)
        e[i] = step
        df[i] = (f(basis.matrix(c0 + e)) - f(basis.matrix(c0 - e))) / (2 * step)
    return basis.matrix(np.linalg.solve(basis.gram, df))


def poisson_bracket(f_idx, h_idx, x, A, g, basis: SoBasis | None = None) -> tuple[float, float]:
    """Lie-Poisson bracket ``<x, [grad f, grad h]>`` of two shift integrals.

    Returns ``(value, scale)`` with ``scale = |x| |G_f| |G_h|``, where ``G`` is
    the gradient in gl before projection onto so(g). Projection can cancel
    a gradient down to roundoff (e.g. for ``tr(x A)``), so the unprojected
    size is the magnitude that roundoff in the bracket is relative to.
    """
    basis = basis or so_basis(_as_form(g))
    Gf = _gl_gradient(x, A, f_idx)
    Gh = _gl_gradient(x, A, h_idx)
    val = trace_pairing(x, commutator(basis.project(Gf), basis.project(Gh)))
    scale = float(np.linalg.norm(x) * np.linalg.norm(Gf) * np.linalg.norm(Gh))
    return float(val), scale


def lax_residual(x, R: SectionalRep, A, B, lam: float) -> float:
    """Normalized ``|[R(x), x] - [R(x) + lam B, x + lam A]|``."""
    x = np.asarray(x, float)
    A = np.asarray(A, float)
    B = np.asarray(B, float)
    Rx = R(x)
    D = commutator(Rx, x) - commutator(Rx + lam * B, x + lam * A)
    scale = (1.0 + np.linalg.norm(Rx) + abs(lam) * np.linalg.norm(B)) * (1.0 + np.linalg.norm(x) + abs(lam) * np.linalg.norm(A))
    return float(np.linalg.norm(D) / scale)


@dataclass
class FlowResult:
    times: np.ndarray
    states: np.ndarray  # subsampled trajectory
    diagnostics: dict = field(default_factory=dict)


def _integral_scales(x0, A, idx):
    nx, na = np.linalg.norm(x0), np.linalg.norm(A)
    return {(k, m): comb(k, m) * nx ** (k - m) * na ** m for k, m in idx}


def integrate(x0, R: SectionalRep, h: float, T: float, A=None, kmax: int | None = None,
              subsample: int = 100) -> FlowResult:
    """Classical fixed-step RK4 for the Euler equation.

    Diagnostics hold the worst g-skewness defect along the trajectory and
    the worst relative drifts of the energy, the Casimir ``<x, x>`` and (if
    ``A`` is given) every shift integral. Drift of an integral is measured
    against ``max(|f(x0)|, binom(k, m) |x0|^(k-m) |A|^m)`` so that integrals
    vanishing identically do not divide by zero.
    """
    if h <= 0 or T <= 0:
        raise ValueError("h and T must be positive")
    g = R.form
    x = np.array(x0, dtype=float)
    steps = int(round(T / h))
    idx = integral_indices(g.n, kmax) if A is not None else []
    H0 = hamiltonian(x, R)
    C0 = trace_pairing(x, x)
    F0 = shift_integrals(x, A, kmax) if A is not None else {}
    scales = _integral_scales(x, A, idx) if A is not None else {}
    nx2 = float(np.linalg.norm(x)) ** 2
    dH = dC = skew = 0.0
    dF = {i: 0.0 for i in idx}
    times, states = [0.0], [x.copy()]
    every = max(1, steps // subsample) if subsample else steps + 1
    L = _dense_map(R)
    for s in range(1, steps + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            x = rk4_step(x, L, h)
        if not np.all(np.isfinite(x)):
            raise NonFiniteStateError(s)
        skew = max(skew, skew_residual(x, g))
        dH = max(dH, abs(0.5 * float((L @ x.ravel()) @ x.T.ravel()) - H0))
        dC = max(dC, abs(trace_pairing(x, x) - C0))
        if A is not None:
            F = shift_integrals(x, A, kmax)
            for i in idx:
                dF[i] = max(dF[i], abs(F[i] - F0[i]))
        if s % every == 0 or s == steps:
            times.append(s * h)
            states.append(x.copy())
    diag = {
        "steps": steps,
        "h": h,
        "T": T,
        "skew_residual": skew,
        "energy_drift": dH / max(abs(H0), nx2 * max(1.0, np.linalg.norm(R.matrix, 2)), np.finfo(float).tiny),
        "casimir_drift": dC / max(abs(C0), nx2, np.finfo(float).tiny),
    }
    if A is not None:
        rel = {i: dF[i] / max(abs(F0[i]), scales[i], np.finfo(float).tiny) for i in idx}
        diag["integral_drift"] = {f"{k},{m}": v for (k, m), v in rel.items()}
        diag["max_integral_drift"] = max(rel.values(), default=0.0)
    return FlowResult(np.array(times), np.array(states), diag)
