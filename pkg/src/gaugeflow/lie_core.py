"""Exact 2x2 matrix algebra for su(2) and su(1,1).

Bases, structure constants, brackets, exponentials, and the adjoint double
cover Ad: G -> Aut(g) realized as 3x3 pseudo-rotation matrices.

Conventions:
    su2  basis: e^j = (i/2) sigma^j, so [e^j, e^k] = -eps_{jkl} e^l.
    su11 basis: e^1 = -sigma^1/2, e^2 = -sigma^2/2, e^3 = (i/2) sigma^3.
Both bases are orthonormal for the invariant pairing <x, y> = -2 tr(xy),
with signature (+,+,+) for su2 and (-,-,+) for su11.  Structure constants
are recomputed from matrix commutators at first use, never transcribed.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

ALGEBRAS = ("su2", "su11")

SIGMA1 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA2 = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA3 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
SIGMA_PLUS = 0.5 * (SIGMA1 + 1.0j * SIGMA2)   # [[0,1],[0,0]]
SIGMA_MINUS = 0.5 * (SIGMA1 - 1.0j * SIGMA2)  # [[0,0],[1,0]]
IDENTITY2 = np.eye(2, dtype=complex)

for _m in (SIGMA1, SIGMA2, SIGMA3, SIGMA_PLUS, SIGMA_MINUS, IDENTITY2):
    _m.setflags(write=False)


def _check_algebra(algebra):
    if algebra not in ALGEBRAS:
        raise ValueError(f"unknown algebra {algebra!r}, expected one of {ALGEBRAS}")


def basis(algebra="su2"):
    """Basis (e^1, e^2, e^3) as a read-only (3, 2, 2) complex array."""
    _check_algebra(algebra)
    if algebra == "su2":
        e = np.stack([0.5j * SIGMA1, 0.5j * SIGMA2, 0.5j * SIGMA3])
    else:
        e = np.stack([-0.5 * SIGMA1, -0.5 * SIGMA2, 0.5j * SIGMA3])
    e.setflags(write=False)
    return e


def pairing(x, y):
    """Invariant pairing <x, y> = -2 tr(xy); both bases are orthonormal for it."""
    x = np.asarray(x)
    y = np.asarray(y)
    return -2.0 * np.einsum("...ab,...ba->...", x, y)


_METRIC_CACHE = {}


def metric(algebra="su2"):
    """Diagonal signature of the pairing on the basis: (1,1,1) or (-1,-1,1)."""
    if algebra not in _METRIC_CACHE:
        e = basis(algebra)
        gram = np.array([[pairing(e[j], e[k]) for k in range(3)] for j in range(3)])
        d = np.real(np.diagonal(gram))
        if not np.allclose(gram, np.diag(d), atol=1e-14):
            raise AssertionError("basis is not orthogonal for the pairing")
        if not np.allclose(np.abs(d), 1.0, atol=1e-14):
            raise AssertionError("basis is not unit-normalized for the pairing")
        d = np.round(d).astype(float)
        d.setflags(write=False)
        _METRIC_CACHE[algebra] = d
    return _METRIC_CACHE[algebra]


_CONST_CACHE = {}


def structure_constants(algebra="su2"):
    """c[i, j, k] with [e^i, e^j] = sum_k c[i, j, k] e^k.

    Computed from matrix commutators and the pairing projection, with a
    reconstruction self-check at 1e-14.  Cached per algebra.
    """
    if algebra not in _CONST_CACHE:
        e = basis(algebra)
        eta = metric(algebra)
        c = np.zeros((3, 3, 3))
        for i in range(3):
            for j in range(3):
                br = e[i] @ e[j] - e[j] @ e[i]
                comp = np.array([eta[k] * pairing(e[k], br) for k in range(3)])
                if not np.allclose(comp.imag, 0.0, atol=1e-14):
                    raise AssertionError("bracket left the real span of the basis")
                c[i, j] = comp.real
                recon = np.einsum("k,kab->ab", c[i, j], e)
                if not np.allclose(recon, br, atol=1e-14):
                    raise AssertionError("structure constants fail to reproduce the bracket")
        c.setflags(write=False)
        _CONST_CACHE[algebra] = c
    return _CONST_CACHE[algebra]


def vector_to_matrix(v, algebra="su2"):
    """Matrix form sum_j v_j e^j of coefficient vectors v with shape (..., 3)."""
    v = np.asarray(v)
    return np.einsum("...j,jab->...ab", v, basis(algebra))


def matrix_to_vector(x, algebra="su2"):
    """Coefficients of x in the basis: v_k = eta_k <e^k, x>.

    Returns a complex array; real algebra elements give (numerically) real
    coefficients, complexified combinations keep their imaginary parts.
    """
    x = np.asarray(x)
    e = basis(algebra)
    eta = metric(algebra)
    comps = -2.0 * np.einsum("kab,...ba->...k", e, x)
    return comps * eta


def bracket_matrix(x, y):
    """Matrix commutator [x, y] for stacked (..., 2, 2) arrays."""
    x = np.asarray(x)
    y = np.asarray(y)
    return x @ y - y @ x


def bracket(xv, yv, algebra="su2"):
    """Bracket in coefficients: (xv, yv) -> c^{ij}_k x_i y_j as a 3-vector."""
    c = structure_constants(algebra)
    xv = np.asarray(xv)
    yv = np.asarray(yv)
    return np.einsum("ijk,...i,...j->...k", c, xv, yv)


def group_inverse(g):
    """Closed-form inverse of (..., 2, 2) matrices via the adjugate."""
    g = np.asarray(g, dtype=complex)
    det = g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] * g[..., 1, 0]
    inv = np.empty_like(g)
    inv[..., 0, 0] = g[..., 1, 1]
    inv[..., 0, 1] = -g[..., 0, 1]
    inv[..., 1, 0] = -g[..., 1, 0]
    inv[..., 1, 1] = g[..., 0, 0]
    return inv / det[..., None, None]


def exp_algebra(x):
    """exp of traceless 2x2 matrices, batched over leading axes.

    Traceless X satisfies X^2 = -det(X) I, so exp X = cosh(w) I + sinhc(w) X
    with w = sqrt(-det X) (complex branch irrelevant: cosh and sinhc are
    even).  Near w = 0 the closed form is kept exact by the sinhc series;
    scaling-and-squaring (scipy expm) is the fallback for entries where the
    quadratic invariant is degenerate but the matrix is large, or w is huge.
    """
    x = np.asarray(x, dtype=complex)
    det = x[..., 0, 0] * x[..., 1, 1] - x[..., 0, 1] * x[..., 1, 0]
    w2 = -det
    w = np.sqrt(w2.astype(complex))

    small = np.abs(w) < 1e-4
    wsafe = np.where(small, 1.0, w)
    cosh = np.where(small, 1.0 + w2 / 2.0 + w2 * w2 / 24.0, np.cosh(wsafe))
    sinhc = np.where(small, 1.0 + w2 / 6.0 + w2 * w2 / 120.0,
                     np.sinh(wsafe) / wsafe)
    out = (cosh[..., None, None] * IDENTITY2
           + sinhc[..., None, None] * x)

    # w ~ 0 with a big matrix means a badly conditioned invariant; |w| huge
    # risks overflow.  Both are outside these algebras' normal range.
    xnorm = np.abs(x).max(axis=(-2, -1))
    bad = (small & (xnorm > 1e3)) | (np.abs(w) > 700.0) | ~np.isfinite(w)
    if np.any(bad):
        flat = out.reshape(-1, 2, 2)
        xflat = x.reshape(-1, 2, 2)
        for idx in np.nonzero(bad.reshape(-1))[0]:
            flat[idx] = scipy.linalg.expm(xflat[idx])
        out = flat.reshape(out.shape)
    return out


def exp_vector(v, algebra="su2"):
    """exp_algebra of the matrix form of coefficient vector(s) v."""
    return exp_algebra(vector_to_matrix(v, algebra))


def adjoint_rotation(g, algebra="su2"):
    """R(g) with Ad(g) e^j = sum_k e^k R[k, j], batched over leading axes.

    R lands in SO(3) for su2 and SO(1,2) for su11; R(g) = R(-g).
    """
    g = np.asarray(g, dtype=complex)
    e = basis(algebra)
    eta = metric(algebra)
    ginv = group_inverse(g)
    conj = np.einsum("...ab,jbc,...cd->...jad", g, e, ginv)
    comps = -2.0 * np.einsum("kab,...jba->...kj", e, conj)
    return comps.real * eta[:, None]


def derivation_matrix(alpha, algebra="su2"):
    """Matrix of ad(alpha) on the basis: M[k, i] = sum_j c^{ji}_k alpha_j."""
    c = structure_constants(algebra)
    alpha = np.asarray(alpha)
    return np.einsum("jik,j->ki", c, alpha)


def is_derivation(M, algebra="su2", tol=1e-12):
    """Check the derivation identity on every index triple.

    A linear map l(e^i) = sum_k M[k,i] e^k is a derivation iff
    sum_s M[k,s] c^{ij}_s = sum_s (M[s,i] c^{sj}_k + M[s,j] c^{is}_k)
    for all i, j, k.
    """
    c = structure_constants(algebra)
    M = np.asarray(M, dtype=float)
    lhs = np.einsum("ks,ijs->ijk", M, c)
    rhs = np.einsum("si,sjk->ijk", M, c) + np.einsum("sj,isk->ijk", M, c)
    return float(np.abs(lhs - rhs).max()) <= tol


def group_membership_defect(g, algebra="su2"):
    """Max entry error of the defining group constraint, plus |det - 1|.

    su2: ||g^H g - I||,  su11: ||g^H sigma3 g - sigma3||.
    """
    g = np.asarray(g, dtype=complex)
    gh = np.conj(np.swapaxes(g, -1, -2))
    if algebra == "su2":
        defect = gh @ g - IDENTITY2
    else:
        _check_algebra(algebra)
        defect = gh @ (SIGMA3 @ g) - SIGMA3
    det = g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] * g[..., 1, 0]
    d1 = np.abs(defect).max() if defect.size else 0.0
    d2 = np.abs(det - 1.0).max() if det.size else 0.0
    return float(max(d1, d2))
