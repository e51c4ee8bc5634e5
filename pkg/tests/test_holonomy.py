import numpy as np
import pytest

from secto.holonomy import (
    QuadraticMetric,
    berger_certificate,
    christoffel,
    covariant_constancy_residual,
    curvature_at,
    curvature_from_second_derivatives,
    extension_tensor,
    fd_second_derivatives,
    formal_curvature,
    realize_metric,
    sample_points,
    verify_realization,
)
from secto.linalg import BilinearForm, JordanBlock, JordanSpec, g_adjoint, realize_jordan
from secto.sectional import bianchi_residual, centralizer


def spec_of(*blocks):
    return JordanSpec(tuple(JordanBlock(*b) for b in blocks))


SCALAR = spec_of((0.5, 1), (0.5, 1), (0.5, 1))
J2 = spec_of((0.0, 2))
J2J2 = spec_of((0.0, 2), (0.0, 2))
CATALOG = {
    "lambda-I3": SCALAR,
    "J2(0)": J2,
    "J2(0)+J2(0)": J2J2,
    "J3(1)": spec_of((1.0, 3)),
    "diag(1,1,2)": JordanSpec.diagonal([1.0, 1.0, 2.0]),
    "J2(0)+J1(0)": spec_of((0.0, 2), (0.0, 1)),
    "mixed-signs": spec_of((1.0, 2, -1), (1.0, 1, 1), (-0.5, 2, -1)),
}


def test_formal_curvature_examples():
    fc = formal_curvature(J2)
    assert not fc.rep.matrix.any()
    fc = formal_curvature(J2J2)
    A, g = realize_jordan(J2J2)
    assert np.linalg.matrix_rank(fc.rep.matrix, tol=1e-10) == centralizer(A, g).dim == 2
    fc = formal_curvature(SCALAR)
    np.testing.assert_allclose(fc.rep.matrix, np.eye(3), atol=1e-15)


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_formal_curvature_is_bianchi_and_inside_centralizer(name):
    spec = CATALOG[name]
    fc = formal_curvature(spec)
    assert bianchi_residual(fc.rep) <= 1e-10
    assert fc.rep.symmetry_residual() <= 1e-12
    C = centralizer(fc.A, fc.rep.form)
    for col in fc.rep.matrix.T:
        assert C.distance(col) <= 1e-10 * max(1.0, np.linalg.norm(col))


def test_berger_examples():
    b = berger_certificate(JordanSpec.diagonal([1.0, 1.0, 2.0]))
    assert b["verdict"] == "Berger-certified" and b["image_rank"] == b["centralizer_dim"] == 1
    b = berger_certificate(spec_of((2.0, 1), (2.0, 1), (2.0, 1), (2.0, 1)))
    assert b["verdict"] == "Berger-certified" and b["image_rank"] == 6
    b = berger_certificate(J2J2)
    assert b["verdict"] == "Berger-certified" and b["image_rank"] == 2


def test_berger_three_blocks_is_not_failed():
    b = berger_certificate(spec_of((0.0, 2), (0.0, 2), (0.0, 2)))
    assert not b["at_most_two_blocks"]
    assert b["verdict"] in ("Berger-certified", "flagged")


def test_extension_tensor_examples():
    rng = np.random.default_rng(0)
    A, g = realize_jordan(J2)
    ext = extension_tensor(J2)
    X = rng.normal(size=(2, 2))
    np.testing.assert_allclose(ext(X), -0.5 * (A @ X + X @ A), atol=1e-15)
    S = np.array([[1.0, 0.0], [0.0, -1.0]])  # spans so(g) for the anti-diagonal g
    np.testing.assert_allclose(-ext(S) + g_adjoint(ext(S), g), A @ S + S @ A, atol=1e-15)
    ext = extension_tensor(SCALAR)
    Y = rng.normal(size=(3, 3))
    np.testing.assert_allclose(ext(Y), -0.5 * Y, atol=1e-15)
    K = Y - Y.T
    np.testing.assert_allclose(-ext(K) + g_adjoint(ext(K), np.eye(3)), K, atol=1e-15)


def test_extension_tensor_identities():
    rng = np.random.default_rng(1)
    for spec in CATALOG.values():
        A, g = realize_jordan(spec)
        ext = extension_tensor(spec)
        fc = formal_curvature(spec)
        for _ in range(10):
            X = rng.normal(size=(spec.n, spec.n))
            assert np.linalg.norm(A @ ext(X) - ext(A @ X)) <= 1e-12 * (1 + np.linalg.norm(X))
            K = ext(X) @ A - A @ ext(X)
            assert np.linalg.norm(K + g_adjoint(K, g)) <= 1e-12 * (1 + np.linalg.norm(X))
        for Xs in fc.rep.basis.elements:
            BX = ext(Xs)
            assert np.linalg.norm(fc.rep(Xs) + BX - g_adjoint(BX, g)) <= 1e-12


def test_quadratic_metric_basics():
    rng = np.random.default_rng(2)
    g0 = BilinearForm(np.diag([1.0, -1.0, 2.0]))
    Bq = rng.normal(size=(3, 3, 3, 3))
    m = QuadraticMetric(g0, Bq)
    assert np.array_equal(m.metric(np.zeros(3)), g0.matrix)
    x = 0.05 * rng.normal(size=3)
    gx = m.metric(x)
    np.testing.assert_allclose(gx, gx.T, atol=1e-15)
    assert not christoffel(m, np.zeros(3)).any()
    G = christoffel(m, x)
    np.testing.assert_allclose(G, G.transpose(0, 2, 1), atol=1e-15)
    # derivative oracle
    h = 1e-6
    fd = np.array([(m.metric(x + h * e) - m.metric(x - h * e)) / (2 * h) for e in np.eye(3)])
    np.testing.assert_allclose(m.dmetric(x), fd, atol=1e-8)
    flat = QuadraticMetric(g0, np.zeros((3, 3, 3, 3)))
    assert not christoffel(flat, x).any()
    assert not curvature_at(flat, x).matrix.any()


def test_realized_metric_g0_exact():
    for spec in CATALOG.values():
        m = realize_metric(spec)
        _, g0 = realize_jordan(spec)
        assert np.array_equal(m.metric(np.zeros(spec.n)), g0.matrix)


def test_scalar_case_has_identity_curvature():
    m = realize_metric(SCALAR)
    np.testing.assert_allclose(curvature_at(m, np.zeros(3)).matrix, np.eye(3), atol=1e-14)


def test_curvature_paths_agree():
    for spec in CATALOG.values():
        m = realize_metric(spec)
        R0 = curvature_at(m, np.zeros(spec.n))
        direct = curvature_from_second_derivatives(m.g0, m.ddmetric())
        assert np.linalg.norm(R0.matrix - direct.matrix) <= 1e-10
        fd = curvature_from_second_derivatives(m.g0, fd_second_derivatives(m.metric, np.zeros(spec.n)))
        assert np.linalg.norm(fd.matrix - formal_curvature(spec).rep.matrix) <= 1e-6


def test_covariant_constancy_and_negative_control():
    A, _ = realize_jordan(J2J2)
    m = realize_metric(J2J2)
    assert covariant_constancy_residual(m, A, np.zeros(4)) == 0.0
    pts = sample_points(m, 20, seed=4)
    assert np.linalg.norm(pts, axis=1).max() <= 0.1
    assert covariant_constancy_residual(m, A, pts) <= 1e-8
    rng = np.random.default_rng(5)
    bad = QuadraticMetric(m.g0, m.Bq + 0.5 * rng.normal(size=m.Bq.shape))
    x = rng.normal(size=4)
    x *= 0.1 / np.linalg.norm(x)
    assert covariant_constancy_residual(bad, A, x) > 1e-3


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_verify_realization_catalog(name):
    rep = verify_realization(CATALOG[name])
    assert rep["ok"], rep["checks"]
    assert rep["g0_exact"]
