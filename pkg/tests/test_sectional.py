import numpy as np
import pytest

from secto.linalg import (
    JordanBlock,
    JordanSpec,
    MatrixPolynomial,
    RoleError,
    realize_jordan,
    skew_residual,
    so_basis,
    trace_pairing,
    wedge,
)
from secto.randomgen import random_form, random_g_skew, random_g_symmetric, random_jordan_spec, random_polynomial
from secto.sectional import (
    InconsistentSystemError,
    NotPolynomialError,
    SectionalRep,
    apply_r0,
    bianchi_residual,
    build_rep,
    centralizer,
    express_polynomial,
    invariant_split,
    joint_sectional_family,
    sectional_residual,
    solution_space,
    spectrum_predict,
    spectrum_verify,
    uniqueness_test,
)

I3 = np.eye(3)
SQ = MatrixPolynomial([0.0, 0.0, 1.0])
X12 = np.array([[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])


def test_apply_r0_examples():
    A = np.diag([1.0, 2.0, 3.0])
    np.testing.assert_allclose(apply_r0(A, SQ, X12, I3), 3 * X12)
    rng = np.random.default_rng(0)
    g = random_form(rng, 4)
    A = random_g_symmetric(rng, g)
    X = random_g_skew(rng, g)
    np.testing.assert_allclose(apply_r0(A, MatrixPolynomial([0.0, 1.0]), X, g), X, atol=1e-15)
    J = np.array([[0.0, 1.0], [0.0, 0.0]])
    gJ = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert not apply_r0(J, SQ, np.diag([1.0, -1.0]), gJ).any()


def test_apply_r0_matches_derivative_of_p():
    # oracle: central difference of p(A + tX) at t = 0
    rng = np.random.default_rng(1)
    g = random_form(rng, 5)
    A = random_g_symmetric(rng, g)
    X = random_g_skew(rng, g)
    p = MatrixPolynomial([0.3, -1.0, 0.5, 0.2, -0.1])
    t = 1e-5
    fd = (p(A + t * X) - p(A - t * X)) / (2 * t)
    np.testing.assert_allclose(apply_r0(A, p, X, g), fd, atol=1e-8)


def test_apply_r0_rejects_wrong_roles():
    A = np.array([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(RoleError):
        apply_r0(A, SQ, np.array([[0.0, 1.0], [-1.0, 0.0]]), np.eye(2))
    with pytest.raises(RoleError):
        apply_r0(np.eye(2), SQ, np.eye(2), np.eye(2))


def test_build_rep_examples():
    R = build_rep(np.diag([1.0, 2.0, 3.0]), SQ, I3)
    np.testing.assert_allclose(R.matrix, np.diag([3.0, 4.0, 5.0]), atol=1e-15)
    p = MatrixPolynomial([1.0, 2.0, -1.0, 0.5])
    a = 0.7
    R = build_rep(a * np.eye(2), p, np.eye(2))
    np.testing.assert_allclose(R.matrix, [[p.derivative()(a)]])
    R = build_rep(np.diag([1.0, 2.0, 3.0]), MatrixPolynomial([4.0]), I3)
    assert not R.matrix.any()


def test_rep_json_roundtrip():
    R = build_rep(np.diag([1.0, 2.0, 3.0]), SQ, I3)
    data = R.to_json()
    assert data["basis"] == "lex-wedge" and data["n"] == 3
    R2 = SectionalRep.from_json(data, I3)
    np.testing.assert_array_equal(R2.matrix, R.matrix)


def test_sectional_residual_examples():
    A = np.diag([1.0, 2.0, 3.0])
    assert sectional_residual(build_rep(A, SQ, I3), A, A @ A) <= 1e-12
    Rid = SectionalRep.identity(I3)
    assert sectional_residual(Rid, 2.0 * I3, np.zeros((3, 3))) == 0.0
    A2 = np.diag([1.0, 2.0])
    r = sectional_residual(SectionalRep.identity(np.eye(2)), A2, np.zeros((2, 2)))
    X = np.array([[0.0, 1.0], [-1.0, 0.0]])
    assert r > 0
    assert r == pytest.approx(np.linalg.norm(X @ A2 - A2 @ X) / (1 + np.linalg.norm(A2)))


def test_random_reps_are_sectional_symmetric_and_skew():
    rng = np.random.default_rng(2)
    for _ in range(100):
        n = int(rng.integers(2, 9))
        g = random_form(rng, n)
        A = random_g_symmetric(rng, g)
        p = random_polynomial(rng, 5)
        R = build_rep(A, p, g)
        assert sectional_residual(R, A, p(A)) <= 1e-10
        X, Y = random_g_skew(rng, g), random_g_skew(rng, g)
        RX = apply_r0(A, p, X, g)
        assert skew_residual(RX, g) <= 1e-12 * (1 + np.linalg.norm(RX))
        lhs, rhs = trace_pairing(RX, Y), trace_pairing(X, apply_r0(A, p, Y, g))
        assert abs(lhs - rhs) <= 1e-11 * (1 + abs(lhs))


def test_bianchi_examples():
    rng = np.random.default_rng(3)
    for _ in range(10):
        g = random_form(rng, 4)
        A = random_g_symmetric(rng, g)
        R = build_rep(A, random_polynomial(rng, 5), g)
        assert bianchi_residual(R, n_random=200, seed=1) <= 1e-11
    b = so_basis(I3)
    assert bianchi_residual(SectionalRep(np.zeros((3, 3)), b)) == 0.0
    # e1^e2 -> e1^e3, everything else -> 0; cyclic sum on (e1, e2, e3) is e1
    M = np.zeros((3, 3))
    M[1, 0] = 1.0
    bad = SectionalRep(M, b)
    e = np.eye(3)
    cyc = (bad(wedge(e[0], e[1], I3)) @ e[2] + bad(wedge(e[1], e[2], I3)) @ e[0]
           + bad(wedge(e[2], e[0], I3)) @ e[1])
    np.testing.assert_array_equal(cyc, e[0])
    assert bianchi_residual(bad, n_random=0) >= 1.0


def test_centralizer_examples():
    assert centralizer(np.diag([1.0, 2.0, 3.0]), I3).dim == 0
    C = centralizer(np.diag([1.0, 1.0, 2.0]), I3)
    assert C.dim == 1
    Y = C.elements[0]
    np.testing.assert_allclose(Y / Y[0, 1], X12, atol=1e-14)
    assert centralizer(2.5 * np.eye(4), np.eye(4)).dim == 6


def test_centralizer_elements_commute():
    rng = np.random.default_rng(4)
    for _ in range(20):
        spec = random_jordan_spec(rng, 7, 3)
        A, g = realize_jordan(spec)
        C = centralizer(A, g)
        for Y in C.elements:
            assert np.linalg.norm(Y @ A - A @ Y) <= 1e-10 * np.linalg.norm(Y) * max(1.0, np.linalg.norm(A))
            assert skew_residual(Y, g) <= 1e-12


def test_solution_space_examples():
    A = np.diag([1.0, 2.0, 3.0])
    R, free = solution_space(A, A @ A, I3)
    assert free == 0
    np.testing.assert_allclose(R.matrix, np.diag([3.0, 4.0, 5.0]), atol=1e-14)
    A = np.diag([1.0, 1.0, 2.0])
    assert solution_space(A, A, I3)[1] == 1
    N = 6
    assert solution_space(np.eye(4), np.eye(4), np.eye(4))[1] == N * (N + 1) // 2
    with pytest.raises(NotPolynomialError, match="not sectional-compatible"):
        solution_space(np.diag([1.0, 1.0, 2.0]), np.diag([1.0, 3.0, 2.0]), I3)


def test_express_polynomial_examples():
    q = express_polynomial(np.diag([1.0, 2.0]), np.diag([1.0, 4.0]))
    assert q.allclose(MatrixPolynomial([-2.0, 3.0]), atol=1e-12)
    A = np.diag([1.0, 2.0, 3.0])
    assert express_polynomial(A, A).allclose(MatrixPolynomial([0.0, 1.0]), atol=1e-12)
    assert express_polynomial(A, np.zeros((3, 3))).is_zero()
    with pytest.raises(NotPolynomialError, match="not commuting"):
        express_polynomial(A, np.ones((3, 3)))
    # commutes with J2(0) (+) J2(0) but is not in span{I, A}
    A, _ = realize_jordan(JordanSpec((JordanBlock(0.0, 2), JordanBlock(0.0, 2))))
    B = np.zeros((4, 4))
    B[0, 3] = B[2, 1] = 1.0
    assert np.allclose(A @ B, B @ A)
    with pytest.raises(NotPolynomialError, match="not a polynomial"):
        express_polynomial(A, B)


def test_user_supplied_sectional_operators_commute():
    # R = k id + (symmetric map into g_A) is sectional for (A, p(A)) with p = k t
    A = np.diag([1.0, 1.0, 2.0, 3.0])
    g = np.eye(4)
    C = centralizer(A, g)
    b = so_basis(g)
    y = C.coords[:, 0]
    M = 2.0 * np.eye(b.dim) + 0.7 * np.outer(y, b.gram @ y)
    R = SectionalRep(M, b)
    B = 2.0 * A
    assert sectional_residual(R, A, B) <= 1e-10
    assert R.symmetry_residual() <= 1e-12
    assert np.linalg.norm(A @ B - B @ A) <= 1e-10
    q = express_polynomial(A, B)
    assert np.linalg.norm(q(A) - B) <= 1e-9


def test_image_in_centralizer_and_two_block_equality():
    cases = [
        [(0.0, 2), (0.0, 2)],
        [(0.0, 2), (0.0, 1)],
        [(1.0, 3), (1.0, 2), (2.0, 1)],
        [(0.0, 1), (0.0, 1), (1.0, 2)],
        [(0.5, 3), (0.5, 1), (-1.0, 2), (-1.0, 2)],
        [(0.0, 2), (0.0, 2), (0.0, 1)],
    ]
    for blocks in cases:
        spec = JordanSpec(tuple(JordanBlock(l, k) for l, k in blocks))
        A, g = realize_jordan(spec)
        R = build_rep(A, spec.minimal_polynomial(), g)
        C = centralizer(A, g)
        for col in R.matrix.T:
            assert C.distance(col) <= 1e-10 * max(1.0, np.linalg.norm(col))
        if max(spec.blocks_per_eigenvalue().values()) <= 2:
            assert np.linalg.matrix_rank(R.matrix, tol=1e-10) == C.dim


def test_spectrum_predict_examples():
    assert spectrum_predict([1.0, 2.0, 3.0], SQ) == [3.0, 4.0, 5.0]
    lam = 0.8
    spec = JordanSpec((JordanBlock(lam, 2),))
    assert spectrum_predict(spec, SQ) == [2 * lam]
    spec = JordanSpec((JordanBlock(1.0, 2), JordanBlock(-0.5, 1), JordanBlock(3.0, 1)))
    assert spectrum_predict(spec, MatrixPolynomial([0.0, 1.0])) == [1.0] * 4


def test_spectrum_verify_examples():
    rep = spectrum_verify(np.diag([1.0, 2.0, 3.0]), SQ, I3)
    assert rep["ok"]
    assert [c["value"] for c in rep["dense_clusters"]] == pytest.approx([3.0, 4.0, 5.0])
    assert [b["dim"] for b in rep["split"]] == [1, 1, 1]
    rep = spectrum_verify(np.diag([1.0, 1.0, 2.0]), SQ, I3)
    assert rep["ok"]
    three = [c for c in rep["dense_clusters"] if abs(c["value"] - 3.0) < 1e-8]
    assert three and three[0]["multiplicity"] >= 2
    A, g = realize_jordan(JordanSpec((JordanBlock(1.0, 2),)))
    rep = spectrum_verify(A, SQ, g)
    assert rep["ok"] and rep["predicted"] == [2.0]


def test_invariant_split_covers_so_g():
    spec = JordanSpec((JordanBlock(1.0, 2), JordanBlock(1.0, 1), JordanBlock(-1.0, 2)))
    A, g = realize_jordan(spec)
    split = invariant_split(A, g, SQ, spec)
    N = g.n * (g.n - 1) // 2
    Q = np.hstack(split.bases)
    assert Q.shape[1] == N
    assert np.linalg.matrix_rank(Q) == N


def test_uniqueness_examples():
    A, A2 = np.diag([1.0, 2.0, 3.0]), np.diag([1.0, 4.0, 9.0])
    v = uniqueness_test(A, 2 * A, A2, 2 * A2, I3)
    assert v.dimension == 0 and v.certified_scalar
    assert v.fitted_k == pytest.approx(2.0, abs=1e-9)
    assert joint_sectional_family(A, A2, I3) == (1, True)
    # the second constraint repeats the first
    A = np.diag([1.0, 1.0, 2.0])
    v = uniqueness_test(A, A, 2 * A + I3, 2 * A, I3)
    assert v.dimension == solution_space(A, A, I3)[1]
    A = np.diag([1.0, 2.0, 3.0])
    with pytest.raises(InconsistentSystemError, match="no common sectional operator"):
        uniqueness_test(A, A @ A, A2, A2 @ A2, I3)
