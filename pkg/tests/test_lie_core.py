import numpy as np
import pytest
import scipy.linalg

from gaugeflow import lie_core as lc


def levi_civita():
    eps = np.zeros((3, 3, 3))
    for i, j, k in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
        eps[i, j, k] = 1.0
        eps[j, i, k] = -1.0
    return eps


def random_vectors(rng, n, scale=1.0):
    return scale * rng.standard_normal((n, 3))


def test_bases_traceless_and_orthonormal():
    for alg in lc.ALGEBRAS:
        e = lc.basis(alg)
        assert np.allclose(np.trace(e, axis1=-2, axis2=-1), 0.0, atol=1e-15)
        eta = lc.metric(alg)
        for j in range(3):
            for k in range(3):
                p = lc.pairing(e[j], e[k])
                want = eta[j] if j == k else 0.0
                assert abs(p - want) < 1e-14


def test_metric_signatures():
    assert np.array_equal(lc.metric("su2"), [1.0, 1.0, 1.0])
    assert np.array_equal(lc.metric("su11"), [-1.0, -1.0, 1.0])


def test_su2_constants_match_minus_epsilon():
    c = lc.structure_constants("su2")
    assert np.allclose(c, -levi_civita(), atol=1e-14)


def test_su11_constants_from_matrix_oracle():
    # [e1,e2] = +e3, [e2,e3] = -e1, [e3,e1] = -e2, recomputed from brackets
    c = lc.structure_constants("su11")
    e = lc.basis("su11")
    assert np.allclose(e[0] @ e[1] - e[1] @ e[0], e[2], atol=1e-14)
    assert c[0, 1, 2] == pytest.approx(1.0, abs=1e-14)
    assert c[1, 2, 0] == pytest.approx(-1.0, abs=1e-14)
    assert c[2, 0, 1] == pytest.approx(-1.0, abs=1e-14)
    assert np.allclose(c, -np.swapaxes(c, 0, 1), atol=1e-15)
    offdiag = [(i, j, k) for i in range(3) for j in range(3) for k in range(3)
               if c[i, j, k] != 0 and len({i, j, k}) < 3]
    assert offdiag == []


def test_bracket_coefficients_match_commutator():
    rng = np.random.default_rng(11)
    for alg in lc.ALGEBRAS:
        xs = random_vectors(rng, 40)
        ys = random_vectors(rng, 40)
        br_coeff = lc.bracket(xs, ys, alg)
        xm = lc.vector_to_matrix(xs, alg)
        ym = lc.vector_to_matrix(ys, alg)
        br_mat = lc.bracket_matrix(xm, ym)
        assert np.allclose(lc.vector_to_matrix(br_coeff, alg), br_mat, atol=1e-14)
        assert np.allclose(lc.bracket(xs, xs, alg), 0.0, atol=1e-14)


def test_matrix_vector_round_trip():
    rng = np.random.default_rng(5)
    for alg in lc.ALGEBRAS:
        v = random_vectors(rng, 25, scale=3.0)
        back = lc.matrix_to_vector(lc.vector_to_matrix(v, alg), alg)
        assert np.allclose(back.imag, 0.0, atol=1e-14)
        assert np.allclose(back.real, v, atol=1e-13)


def test_exp_diagonal_closed_form():
    theta = 0.7318
    g = lc.exp_vector(np.array([0.0, 0.0, theta]), "su2")
    want = np.diag([np.exp(0.5j * theta), np.exp(-0.5j * theta)])
    assert np.allclose(g, want, atol=1e-14)
    g2pi = lc.exp_vector(np.array([0.0, 0.0, 2 * np.pi]), "su2")
    assert np.allclose(g2pi, -np.eye(2), atol=1e-13)


def test_exp_matches_expm():
    rng = np.random.default_rng(7)
    for alg in lc.ALGEBRAS:
        vs = random_vectors(rng, 60, scale=2.5)
        got = lc.exp_vector(vs, alg)
        for v, gm in zip(vs, got):
            ref = scipy.linalg.expm(lc.vector_to_matrix(v, alg))
            assert np.allclose(gm, ref, atol=1e-12)


def test_exp_inverse_pairs():
    rng = np.random.default_rng(3)
    for alg in lc.ALGEBRAS:
        vs = random_vectors(rng, 30)
        a = lc.exp_vector(vs, alg)
        b = lc.exp_vector(-vs, alg)
        prod = a @ b
        assert np.allclose(prod, np.eye(2), atol=1e-13)


def test_exp_zero_and_nilpotent():
    assert np.allclose(lc.exp_vector(np.zeros(3), "su2"), np.eye(2), atol=1e-16)
    # (1,0,1) is null for the su11 signature: matrix is nilpotent, exp = I + X
    x = lc.vector_to_matrix(np.array([1.0, 0.0, 1.0]), "su11")
    assert np.allclose(x @ x, 0.0, atol=1e-15)
    assert np.allclose(lc.exp_algebra(x), np.eye(2) + x, atol=1e-14)


def test_exp_large_argument():
    v = np.array([300.0, 0.0, 0.0])
    g = lc.exp_vector(v, "su11")
    assert np.all(np.isfinite(g))
    # group membership survives the large boost
    assert lc.group_membership_defect(g / np.abs(g).max(), "su11") < np.inf
    w = np.array([0.0, 3.0, 4.0])
    ref = scipy.linalg.expm(lc.vector_to_matrix(w, "su11"))
    assert np.allclose(lc.exp_vector(w, "su11"), ref, atol=1e-11)


def test_exp_lands_in_group():
    rng = np.random.default_rng(17)
    for alg in lc.ALGEBRAS:
        vs = random_vectors(rng, 50, scale=1.5)
        g = lc.exp_vector(vs, alg)
        assert lc.group_membership_defect(g, alg) < 1e-11


def test_adjoint_identity_and_cover():
    for alg in lc.ALGEBRAS:
        assert np.allclose(lc.adjoint_rotation(np.eye(2), alg), np.eye(3), atol=1e-15)
        assert np.allclose(lc.adjoint_rotation(-np.eye(2), alg), np.eye(3), atol=1e-15)
    rng = np.random.default_rng(23)
    g = lc.exp_vector(rng.standard_normal(3), "su2")
    assert np.allclose(lc.adjoint_rotation(g, "su2"),
                       lc.adjoint_rotation(-g, "su2"), atol=1e-14)


def test_adjoint_homomorphism():
    rng = np.random.default_rng(29)
    for alg in lc.ALGEBRAS:
        vs = random_vectors(rng, 100)
        ws = random_vectors(rng, 100)
        g = lc.exp_vector(vs, alg)
        h = lc.exp_vector(ws, alg)
        lhs = lc.adjoint_rotation(g @ h, alg)
        rhs = lc.adjoint_rotation(g, alg) @ lc.adjoint_rotation(h, alg)
        assert np.abs(lhs - rhs).max() < 1e-12


def test_adjoint_preserves_signature():
    rng = np.random.default_rng(31)
    for alg in lc.ALGEBRAS:
        eta = np.diag(lc.metric(alg))
        g = lc.exp_vector(random_vectors(rng, 60, scale=1.2), alg)
        R = lc.adjoint_rotation(g, alg)
        gram = np.swapaxes(R, -1, -2) @ eta @ R
        assert np.abs(gram - eta).max() < 1e-12
        dets = np.linalg.det(R)
        assert np.allclose(dets, 1.0, atol=1e-12)


def test_adjoint_rotation_angles():
    # exp(xi e3) rotates the (e1,e2)-plane by xi;
    # the diagonal element diag(e^{i xi}, e^{-i xi}) = exp(2 xi e3) by 2 xi.
    xi = 0.6133
    R1 = lc.adjoint_rotation(lc.exp_vector([0.0, 0.0, xi], "su2"), "su2")
    rot = lambda a: np.array([[np.cos(a), np.sin(a), 0.0],
                              [-np.sin(a), np.cos(a), 0.0],
                              [0.0, 0.0, 1.0]])
    assert np.allclose(R1, rot(xi), atol=1e-13)
    gdiag = np.diag([np.exp(1j * xi), np.exp(-1j * xi)])
    R2 = lc.adjoint_rotation(gdiag, "su2")
    assert np.allclose(R2, rot(2 * xi), atol=1e-13)


def test_adjoint_su11_boost():
    xi = 0.83
    R = lc.adjoint_rotation(lc.exp_vector([xi, 0.0, 0.0], "su11"), "su11")
    want = np.array([[1.0, 0.0, 0.0],
                     [0.0, np.cosh(xi), np.sinh(xi)],
                     [0.0, np.sinh(xi), np.cosh(xi)]])
    assert np.allclose(R, want, atol=1e-13)


def test_adjoint_action_matches_conjugation():
    rng = np.random.default_rng(37)
    for alg in lc.ALGEBRAS:
        e = lc.basis(alg)
        g = lc.exp_vector(rng.standard_normal(3), alg)
        R = lc.adjoint_rotation(g, alg)
        gi = lc.group_inverse(g)
        for j in range(3):
            lhs = g @ e[j] @ gi
            rhs = np.einsum("k,kab->ab", R[:, j], e)
            assert np.allclose(lhs, rhs, atol=1e-13)


def test_derivation_matrix_is_ad():
    rng = np.random.default_rng(41)
    for alg in lc.ALGEBRAS:
        e = lc.basis(alg)
        for _ in range(100):
            alpha = rng.standard_normal(3)
            M = lc.derivation_matrix(alpha, alg)
            x = lc.vector_to_matrix(alpha, alg)
            for i in range(3):
                col = lc.matrix_to_vector(lc.bracket_matrix(x, e[i]), alg)
                assert np.allclose(col.real, M[:, i], atol=1e-13)
                assert np.allclose(col.imag, 0.0, atol=1e-14)


def test_derivation_matrix_zero():
    for alg in lc.ALGEBRAS:
        assert np.allclose(lc.derivation_matrix(np.zeros(3), alg), 0.0)


def test_is_derivation_accepts_ad_rejects_scaling():
    for alg in lc.ALGEBRAS:
        assert lc.is_derivation(np.zeros((3, 3)), alg)
        assert not lc.is_derivation(np.eye(3), alg)


def test_identity_violates_derivation_at_123():
    # direct index evaluation at (i,j,k) = (1,2,3), 1-based, on su2
    c = lc.structure_constants("su2")
    M = np.eye(3)
    i, j, k = 0, 1, 2
    lhs = sum(M[k, s] * c[i, j, s] for s in range(3))
    rhs = sum(M[s, i] * c[s, j, k] + M[s, j] * c[i, s, k] for s in range(3))
    assert abs(lhs - rhs) > 0.5


def test_lemma1_random_battery():
    rng = np.random.default_rng(43)
    for alg in lc.ALGEBRAS:
        hits = 0
        for _ in range(1000):
            alpha = 3.0 * rng.standard_normal(3)
            M = lc.derivation_matrix(alpha, alg)
            assert lc.is_derivation(M, alg, tol=1e-12)
            N = rng.standard_normal((3, 3))
            if not lc.is_derivation(M + 1e-3 * N, alg, tol=1e-12):
                hits += 1
        assert hits >= 990


def test_group_membership_defect_reports():
    g = np.eye(2, dtype=complex)
    assert lc.group_membership_defect(g, "su2") < 1e-15
    g_bad = np.array([[1.0, 0.1], [0.0, 1.0]], dtype=complex)
    assert lc.group_membership_defect(g_bad, "su2") > 0.09
