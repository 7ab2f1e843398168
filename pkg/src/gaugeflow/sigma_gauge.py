"""Dictionary between S^2 sigma-model data (S, t) and abelian gauge pairs
(V, q): both directions, curvature residuals, gauge transformations,
topological charge, and the universal (Fubini-Study) pair of a rational map.

Gauge conventions: A = -iV; complex coordinate parts X_z = (X_0 - i X_1)/2,
X_zbar = (X_0 + i X_1)/2 for one-form components along the grid axes.

Frames built from a rational map zeta = n/d use the projective section

    t_plus = (d^2 - n^2, i(d^2 + n^2), -2nd) / (|n|^2 + |d|^2),

which equals the affine closed form (1 - zeta^2, i(1 + zeta^2), -2 zeta)
/ (1 + |zeta|^2) times the phase d^2/|d|^2.  The phase is a gauge rotation
in the tangent plane, trivial for polynomial maps, and lets frames and the
gauge pair stay finite across poles of zeta.
"""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np
from numpy.polynomial import polynomial as P

from . import lie_core as lc
from . import grid_fields as gf
from . import kernels


# ---------------------------------------------------------------------------
# Rational maps with exact derivatives

def _trim(c, tol=1e-13):
    c = np.atleast_1d(np.asarray(c, dtype=complex))
    scale = np.abs(c).max() if c.size else 0.0
    if scale == 0.0:
        return np.zeros(1, dtype=complex)
    keep = np.nonzero(np.abs(c) > tol * scale)[0]
    if keep.size == 0:
        return np.zeros(1, dtype=complex)
    return c[: keep[-1] + 1].copy()


def _poly_gcd(a, b, tol=1e-12):
    a = _trim(a, tol)
    b = _trim(b, tol)
    if len(a) < len(b):
        a, b = b, a
    while len(b) > 1:
        _, r = P.polydiv(a, b)
        r = _trim(r, tol)
        if len(r) == 1 and r[0] == 0.0:
            return b
        a, b = b, r
    return np.ones(1, dtype=complex)


@dataclass(frozen=True)
class RationalMap:
    """zeta(z) = num(z)/den(z), coefficient lists low-to-high, gcd-reduced."""
    num: np.ndarray
    den: np.ndarray

    def __init__(self, num, den=(1.0,)):
        num = _trim(num)
        den = _trim(den)
        if len(den) == 1 and den[0] == 0.0:
            raise ValueError("denominator is identically zero")
        g = _poly_gcd(num, den)
        if len(g) > 1:
            num = _trim(P.polydiv(num, g)[0])
            den = _trim(P.polydiv(den, g)[0])
        lead = den[-1]
        num = num / lead
        den = den / lead
        num.setflags(write=False)
        den.setflags(write=False)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @property
    def degree(self):
        return max(len(self.num), len(self.den)) - 1

    def nd_values(self, z):
        return P.polyval(z, self.num), P.polyval(z, self.den)

    def __call__(self, z):
        n, d = self.nd_values(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            return n / d

    def wronskian_coeffs(self):
        # W = n' d - n d', the numerator of the exact derivative
        return _trim(P.polysub(P.polymul(P.polyder(self.num), self.den),
                               P.polymul(self.num, P.polyder(self.den))))

    def wronskian(self, z):
        return P.polyval(z, self.wronskian_coeffs())

    def deriv(self, z):
        n, d = self.nd_values(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.wronskian(z) / d**2

    def compose_affine(self, a, b=0.0):
        """The map z -> zeta(a z + b) as a new RationalMap."""
        def comp(c):
            res = np.array([c[-1]], dtype=complex)
            for k in range(len(c) - 2, -1, -1):
                res = P.polyadd(P.polymul(res, [b, a]), [c[k]])
            return res
        return RationalMap(comp(self.num), comp(self.den))


# ---------------------------------------------------------------------------
# Stereographic projection

def stereo(zeta):
    """Unit 3-vector of complex sample(s): S1+iS2 = 2 zeta/(1+|z|^2),
    S3 = (1-|z|^2)/(1+|z|^2).  Infinite zeta maps to (0,0,-1)."""
    zeta = np.asarray(zeta, dtype=complex)
    S = np.empty(zeta.shape + (3,), dtype=float)
    finite = np.isfinite(zeta)
    zf = np.where(finite, zeta, 0.0)
    denom = 1.0 + np.abs(zf) ** 2
    w = 2.0 * zf / denom
    S[..., 0] = np.where(finite, w.real, 0.0)
    S[..., 1] = np.where(finite, w.imag, 0.0)
    S[..., 2] = np.where(finite, (1.0 - np.abs(zf) ** 2) / denom, -1.0)
    return S


def stereo_inv(S, tol=1e-12):
    """(zeta, at_infinity) with zeta = (S1+iS2)/(1+S3); the south pole maps
    to inf with the flag set rather than raising."""
    S = np.asarray(S, dtype=float)
    denom = 1.0 + S[..., 2]
    at_inf = denom <= tol
    safe = np.where(at_inf, 1.0, denom)
    zeta = (S[..., 0] + 1j * S[..., 1]) / safe
    zeta = np.where(at_inf, np.inf + 0j, zeta)
    return zeta, at_inf


# ---------------------------------------------------------------------------
# Spin frames

@dataclass
class SpinFrame:
    """Unit spin field S with orthonormal tangent vector t (per node);
    t_plus = t + i S x t, t_minus its conjugate."""
    grid: gf.Grid2
    S: np.ndarray      # (nx, ny, 3) real
    t: np.ndarray      # (nx, ny, 3) real
    algebra: str = "su2"

    @property
    def tplus(self):
        return self.t + 1j * np.cross(self.S, self.t)

    @property
    def tminus(self):
        return np.conj(self.tplus)

    def frame_defect(self):
        """Max violation of |S| = 1, |t| = 1, S.t = 0 (Euclidean case)."""
        dS = np.abs((self.S**2).sum(-1) - 1.0).max()
        dt = np.abs((self.t**2).sum(-1) - 1.0).max()
        dort = np.abs((self.S * self.t).sum(-1)).max()
        return float(max(dS, dt, dort))


def frames_of_map(rmap, grid):
    """SpinFrame of a rational map on a grid, via the projective section
    (finite at poles of the map)."""
    Z = grid.zmesh()
    n, d = rmap.nd_values(Z)
    sig = np.abs(n) ** 2 + np.abs(d) ** 2
    S = np.empty(grid.shape + (3,), dtype=float)
    w = 2.0 * n * np.conj(d) / sig
    S[..., 0] = w.real
    S[..., 1] = w.imag
    S[..., 2] = (np.abs(d) ** 2 - np.abs(n) ** 2) / sig
    tp = np.empty(grid.shape + (3,), dtype=complex)
    tp[..., 0] = (d**2 - n**2) / sig
    tp[..., 1] = 1j * (d**2 + n**2) / sig
    tp[..., 2] = -2.0 * n * d / sig
    return SpinFrame(grid, S, tp.real)


# ---------------------------------------------------------------------------
# Gauge data

@dataclass
class GaugeData:
    """Real connection components V[..., mu] and complex one-form
    q[..., mu], mu = grid axis; A = -iV."""
    grid: gf.Grid2
    V: np.ndarray      # (nx, ny, 2) real
    q: np.ndarray      # (nx, ny, 2) complex
    algebra: str = "su2"

    def z_parts(self):
        """(q_z, q_zbar, A_z, A_zbar) with X_z = (X_0 - i X_1)/2."""
        q0, q1 = self.q[..., 0], self.q[..., 1]
        A0, A1 = -1j * self.V[..., 0], -1j * self.V[..., 1]
        return (0.5 * (q0 - 1j * q1), 0.5 * (q0 + 1j * q1),
                0.5 * (A0 - 1j * A1), 0.5 * (A0 + 1j * A1))


def gauge_from_z_parts(grid, qz, qzb, Az, Azb, algebra="su2", atol=1e-10):
    """Assemble GaugeData from complex-coordinate parts; A must be
    anti-Hermitian (A_zbar = -conj(A_z)) so V comes out real."""
    if np.abs(Azb + np.conj(Az)).max() > atol:
        raise ValueError("A_zbar must equal -conj(A_z) for a real V")
    q = np.stack([qz + qzb, 1j * (qz - qzb)], axis=-1)
    Vx = 1j * (Az + Azb)
    Vy = -(Az - Azb)
    V = np.stack([Vx.real, Vy.real], axis=-1)
    return GaugeData(grid, V, np.asarray(q, dtype=complex), algebra)


def connection_matrices(gd):
    """J_mu = q_mu sigma^- + s conj(q_mu) sigma^+ + V_mu e^3 as 2x2 fields;
    s = -1 for su2, +1 for su11."""
    s = -1.0 if gd.algebra == "su2" else 1.0
    out = []
    for mu in (0, 1):
        q = gd.q[..., mu]
        V = gd.V[..., mu]
        J = np.empty(q.shape + (2, 2), dtype=complex)
        J[..., 0, 0] = 0.5j * V
        J[..., 0, 1] = s * np.conj(q)
        J[..., 1, 0] = q
        J[..., 1, 1] = -0.5j * V
        out.append(J)
    return out[0], out[1]


def spin_to_gauge(sf):
    """(GaugeData, reconstruction residual) from a spin frame.

    q_mu = (1/2) t_plus . d_mu S and V_mu = Re[(1/2i) t_minus . d_mu t_plus],
    the pairings that invert dS = q t_minus + conj(q) t_plus.  The residual
    d_mu S - q_mu t_minus - conj(q_mu) t_plus is returned with shape
    (nx, ny, 2, 3); it vanishes at FD order for genuine frames.
    """
    defect = sf.frame_defect()
    if defect > 1e-8:
        raise ValueError(f"spin frame violates unit/orthogonality invariants by {defect:.2e}")
    g = sf.grid
    tp = sf.tplus
    tm = np.conj(tp)
    q = np.empty(g.shape + (2,), dtype=complex)
    V = np.empty(g.shape + (2,), dtype=float)
    recon = np.empty(g.shape + (2, 3), dtype=complex)
    for mu in (0, 1):
        dS = gf.diff(g, sf.S, mu)
        dtp = gf.diff(g, tp, mu)
        q[..., mu] = 0.5 * np.einsum("...c,...c->...", tp, dS)
        V[..., mu] = np.real(-0.5j * np.einsum("...c,...c->...", tm, dtp))
        recon[..., mu, :] = dS - q[..., mu, None] * tm - np.conj(q[..., mu, None]) * tp
    return GaugeData(g, V, q, sf.algebra), recon


def curvature_residual(gd):
    """(R_F, R_q): zero-curvature residuals of the su2 gauge pair.

    R_F = d0 V1 - d1 V0 - 2i(q0 conj(q1) - conj(q0) q1)   (real)
    R_q = (d0 - iV0) q1 - (d1 - iV1) q0
    """
    g = gd.grid
    V0, V1 = gd.V[..., 0], gd.V[..., 1]
    q0, q1 = gd.q[..., 0], gd.q[..., 1]
    RF = gf.diff(g, V1, 0) - gf.diff(g, V0, 1) + 4.0 * np.imag(q0 * np.conj(q1))
    Rq = (gf.diff(g, q1, 0) - 1j * V0 * q1) - (gf.diff(g, q0, 1) - 1j * V1 * q0)
    return RF, Rq


def gauge_transform(gd, alpha):
    """q -> e^{i alpha} q, V -> V + d alpha (alpha a real scalar field)."""
    g = gd.grid
    alpha = np.asarray(alpha, dtype=float)
    phase = np.exp(1j * alpha)
    q = gd.q * phase[..., None]
    V = gd.V + np.stack([gf.diff(g, alpha, 0), gf.diff(g, alpha, 1)], axis=-1)
    return GaugeData(g, V, q, gd.algebra)


# ---------------------------------------------------------------------------
# Frame reconstruction by path-ordered integration

def frame_group_element(S, t):
    """SU(2) element whose adjoint columns are (t, S x t, S) (base frame).

    Note Ad(exp(beta u.e)) rotates 3-vectors about the unit axis u by -beta
    in the right-handed orientation, hence the sign flips below.
    """
    S = np.asarray(S, dtype=float)
    t = np.asarray(t, dtype=float)
    e3 = np.array([0.0, 0.0, 1.0])
    c = float(np.clip(S[2], -1.0, 1.0))
    if c > 1.0 - 1e-12:
        g1 = np.eye(2, dtype=complex)
    elif c < -1.0 + 1e-12:
        g1 = lc.exp_vector(np.pi * np.array([1.0, 0.0, 0.0]))
    else:
        axis = np.cross(e3, S)
        axis /= np.linalg.norm(axis)
        g1 = lc.exp_vector(-np.arccos(c) * axis)
    t0 = lc.adjoint_rotation(g1)[:, 0]
    beta = np.arctan2(-float(np.dot(S, np.cross(t0, t))), float(np.dot(t0, t)))
    return lc.exp_vector(beta * S) @ g1


def gauge_to_frame(gd, g0=None, first_axis=1):
    """Reconstruct the spin frame from gauge data.

    Integrates dg = g J along the base column then every row (RK4, group
    reprojection per step), then reads S and t off the adjoint columns
    m^3, m^1.  Returns (SpinFrame, drift); path dependence is bounded by the
    curvature residual, which callers should check.
    """
    J0, J1 = connection_matrices(gd)
    kind = 0 if gd.algebra == "su2" else 1
    G, drift = kernels.path_sweep(J0, J1, gd.grid.hx, gd.grid.hy,
                                  gd.grid.base_index, g0, kind, first_axis)
    R = lc.adjoint_rotation(G, gd.algebra)
    S = R[..., :, 2].copy()
    t = R[..., :, 0].copy()
    return SpinFrame(gd.grid, S, t, gd.algebra), drift


# ---------------------------------------------------------------------------
# Topological charge

def charge_density(grid, S):
    """(1/2pi) S . (d0 S x d1 S) per node.

    Uses the 4th-order interior stencil: the charge integral converges like
    the worst pointwise derivative error, and 2nd order needs impractically
    fine grids to hit percent-level quantization.
    """
    dS0 = gf.diff4(grid, S, 0)
    dS1 = gf.diff4(grid, S, 1)
    return np.einsum("...c,...c->...", S, np.cross(dS0, dS1)) / (2.0 * np.pi)


def top_charge(grid, S, radius=None):
    """Trapezoid integral of the charge density, optionally truncated to a
    disc about the origin.  Near 2*degree for rational-map spin fields."""
    dens = charge_density(grid, S)
    wx = np.full(grid.nx, grid.hx)
    wx[0] *= 0.5
    wx[-1] *= 0.5
    wy = np.full(grid.ny, grid.hy)
    wy[0] *= 0.5
    wy[-1] *= 0.5
    w = np.outer(wx, wy)
    if radius is not None:
        X, Y = grid.mesh()
        w = np.where(X**2 + Y**2 <= radius**2, w, 0.0)
    return float((dens * w).sum())


# ---------------------------------------------------------------------------
# Universal pair of a rational map (analytic, no finite differences)

def fubini_pair(rmap, grid):
    """GaugeData of the pulled-back universal pair, evaluated exactly.

    In the projective gauge: q_z = W / Sigma, q_zbar = 0,
    A_z = -d_z log Sigma, with W the map's Wronskian and
    Sigma = |num|^2 + |den|^2.  Matches spin_to_gauge(frames_of_map(.))
    to FD order; finite at poles of the map.
    """
    Z = grid.zmesh()
    n, d = rmap.nd_values(Z)
    npr = P.polyval(Z, P.polyder(rmap.num))
    dpr = P.polyval(Z, P.polyder(rmap.den))
    sig = np.abs(n) ** 2 + np.abs(d) ** 2
    W = rmap.wronskian(Z)
    qz = W / sig
    Lz = (npr * np.conj(n) + dpr * np.conj(d)) / sig   # d_z log Sigma
    Az = -Lz
    Azb = np.conj(Lz)
    return gauge_from_z_parts(grid, qz, np.zeros_like(qz), Az, Azb)
