"""Hyperboloid sigma model over the upper half-plane and its gauge dictionary.

Spin fields take values in the unit hyperboloid of su(1,1) (signature
(-,-,+), sheet S3 >= 1) over bands z = t + ir with r > 0.  The abelian
gauge pair (V, q) obeys the curvature relation with the opposite q-term
sign from the su(2) case, the scalar potential solves the hyperbolic
Liouville equation Delta phi = 8 e^phi, and a change of variables maps
the system onto a cylindrically reduced self-dual Yang-Mills form.

Grids are expected to carry labels ("t", "r") with axis 1 strictly
positive; constructors validate r > 0 but leave band placement to the
caller (r_min >= 0.25 keeps the 1/r^2 terms well conditioned).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import grid_fields as gf
from . import lie_core as lc
from . import sigma_gauge as sg

EPS_MASK = 1e-6


def minkowski_cross(u, v):
    """(u x v)_k = c^{ij}_k u_i v_j with the computed su(1,1) constants."""
    return lc.bracket(u, v, "su11")


def _rmesh(grid):
    R = grid.mesh()[1]
    if R.min() <= 0.0:
        raise ValueError("grid must lie in the open upper half-plane (r > 0)")
    return R


# ---------------------------------------------------------------------------
# Hyperboloid points and spin fields

def hyp_stereo(zeta):
    """Hyperboloid point(s) of disc sample(s): S1+iS2 = 2 zeta/(1-|zeta|^2),
    S3 = (1+|zeta|^2)/(1-|zeta|^2).  Rejects |zeta| >= 1."""
    zeta = np.asarray(zeta, dtype=complex)
    m = np.abs(zeta) ** 2
    if m.size and m.max() >= 1.0:
        raise ValueError("hyp_stereo needs |zeta| < 1")
    S = np.empty(zeta.shape + (3,), dtype=float)
    w = 2.0 * zeta / (1.0 - m)
    S[..., 0] = w.real
    S[..., 1] = w.imag
    S[..., 2] = (1.0 + m) / (1.0 - m)
    return S


def minkowski_dot(u, v):
    return -u[..., 0] * v[..., 0] - u[..., 1] * v[..., 1] + u[..., 2] * v[..., 2]


@dataclass
class HypSpinField:
    """Spin field on the S3 >= 1 sheet, with an optional Minkowski-unit
    tangent vector t per node."""
    grid: gf.Grid2
    S: np.ndarray      # (nx, ny, 3) real
    t: np.ndarray | None = None

    def __post_init__(self):
        _rmesh(self.grid)
        d = self.sheet_defect()
        if d > 1e-10:
            raise ValueError(f"field leaves the unit hyperboloid sheet by {d:.2e}")

    def sheet_defect(self):
        dS = np.abs(minkowski_dot(self.S, self.S) - 1.0).max()
        sheet = max(1.0 - self.S[..., 2].min(), 0.0)
        return float(max(dS, sheet))

    def frame_defect(self):
        """Max violation of <S,S> = 1, <t,t> = -1, <S,t> = 0 (Minkowski)."""
        d = self.sheet_defect()
        if self.t is None:
            return d
        dt = np.abs(minkowski_dot(self.t, self.t) + 1.0).max()
        dort = np.abs(minkowski_dot(self.S, self.t)).max()
        return float(max(d, dt, dort))

    @property
    def tplus(self):
        if self.t is None:
            raise ValueError("no tangent frame attached")
        return self.t + 1j * minkowski_cross(self.S, self.t)

    @property
    def tminus(self):
        return np.conj(self.tplus)


def hyp_frames_of_map(tau, grid):
    """HypSpinField of a rational half-plane map.

    Uses the disc section zeta = conj((tau - i)/(tau + i)); this is the
    orientation annihilated by the first-order flow d0 S = -S x d1 S with
    the bracket-induced cross (the opposite section solves the flipped
    sign).  The tangent t is the pushforward of the Re-zeta coordinate
    direction, Minkowski-normalized.
    """
    Z = grid.zmesh()
    n, d = tau.nd_values(Z)
    tv = n / d
    im = np.imag(tv)
    if not np.all(np.isfinite(tv)) or im.min() <= 0.0:
        raise ValueError("map must take the grid into the upper half-plane")
    zeta = np.conj((tv - 1j) / (tv + 1j))
    S = hyp_stereo(zeta)
    den = 1.0 - np.abs(zeta) ** 2
    u = zeta.real
    tc = 1.0 + 2.0 * u * zeta / den
    t = np.empty(grid.shape + (3,), dtype=float)
    t[..., 0] = tc.real
    t[..., 1] = tc.imag
    t[..., 2] = 2.0 * u / den
    return HypSpinField(grid, S, t)


def hyp_spin_residual(hf):
    """d0 S + S x_m d1 S, the first-order chiral flow residual."""
    g = hf.grid
    return gf.diff(g, hf.S, 0) + minkowski_cross(hf.S, gf.diff(g, hf.S, 1))


# ---------------------------------------------------------------------------
# Hyperbolic Liouville scalar

@dataclass(frozen=True)
class HypLiouville:
    grid: gf.Grid2
    phi: np.ndarray
    mask: np.ndarray        # nodes where the density degenerated or Im tau <= 0
    source: sg.RationalMap


def hyp_liouville_from_map(tau, grid, eps_mask=EPS_MASK):
    """log(|tau'|^2 / (4 Im(tau)^2)) sampled with the analytic derivative.

    Written projectively: for tau = n/d the density is |W|^2 / (2 Im(n
    conj(d)))^2 with W the numerator Wronskian, finite across poles of
    tau.  Nodes where Im(n conj(d)) <= 0, or where either of |W| and
    2 Im(n conj(d)) falls under eps_mask times the other, are masked and
    phi is clipped there rather than trusted.
    """
    if tau.degree == 0:
        raise ValueError("constant map has no Liouville density")
    Z = grid.zmesh()
    n, d = tau.nd_values(Z)
    w = np.abs(tau.wronskian(Z))
    im2 = 2.0 * np.imag(n * np.conj(d))
    mask = (im2 <= 0.0) | (w <= eps_mask * im2) | (im2 <= eps_mask * w)
    dens = (w / np.maximum(np.abs(im2), 1e-300)) ** 2
    phi = np.log(np.maximum(dens, 1e-300))
    return HypLiouville(grid, phi, mask, tau)


def hyp_liouville_residual(grid, phi):
    """laplacian(phi) - 8 e^phi (opposite curvature sign from the compact
    disc model, which solves -laplacian(phi) = 8 e^phi)."""
    return gf.laplacian(grid, phi) - 8.0 * np.exp(phi)


def hyp_liouville_gauge(grid, phi):
    """Abelian pair of a hyperbolic Liouville field: A_z = phi_z/2,
    q_z = e^{phi/2}, q_zbar = 0, tagged su11."""
    fz, fzb = gf.wirtinger(grid, phi)
    qz = np.exp(0.5 * np.asarray(phi, dtype=float)).astype(complex)
    return sg.gauge_from_z_parts(grid, qz, np.zeros_like(qz),
                                 0.5 * fz, -0.5 * fzb, algebra="su11")


def hyp_curvature_residual(gd):
    """(R_F, R_q) with the su(1,1) curvature convention.

    R_F = d0 V1 - d1 V0 - 4 Im(q0 conj(q1)), the q-term sign flipped
    relative to sigma_gauge.curvature_residual; R_q = d_A q as there.
    """
    g = gd.grid
    V0, V1 = gd.V[..., 0], gd.V[..., 1]
    q0, q1 = gd.q[..., 0], gd.q[..., 1]
    RF = gf.diff(g, V1, 0) - gf.diff(g, V0, 1) - 4.0 * np.imag(q0 * np.conj(q1))
    Rq = (gf.diff(g, q1, 0) - 1j * V0 * q1) - (gf.diff(g, q0, 1) - 1j * V1 * q0)
    return RF, Rq


# ---------------------------------------------------------------------------
# Cylindrical reduction

@dataclass
class WittenData:
    """Reduced gauge field B (anti-Hermitian: B_zbar = -conj(B_z), so the
    axis components are imaginary), Higgs-like scalar phi, and the
    reduction weight kappa.  psi carries the curved Liouville potential
    when the data came from one."""
    grid: gf.Grid2
    B0: np.ndarray     # (nx, ny) complex, imaginary-valued
    B1: np.ndarray
    phi: np.ndarray    # (nx, ny) complex
    kappa: float
    psi: np.ndarray | None = None

    def __post_init__(self):
        _rmesh(self.grid)
        scale = 1.0 + max(np.abs(self.B0).max(), np.abs(self.B1).max())
        worst = max(np.abs(self.B0.real).max(), np.abs(self.B1.real).max())
        if worst > 1e-8 * scale:
            raise ValueError(f"B components must be imaginary, real part {worst:.2e}")

    @property
    def Bz(self):
        return 0.5 * (self.B0 - 1j * self.B1)

    @property
    def Bzb(self):
        return 0.5 * (self.B0 + 1j * self.B1)

    @property
    def W0(self):
        return np.real(1j * self.B0)

    @property
    def W1(self):
        return np.real(1j * self.B1)

    @property
    def phi1(self):
        return 2.0 * self.phi.real

    @property
    def phi2(self):
        return 2.0 * self.phi.imag


def witten_transform(grid, A0, A1, phicoef, kappa):
    """Change of variables A0 = B0 + i kappa/r, A1 = B1, Phi = (phi/r) dz:
    strips the kappa/r piece off A0 and rescales the (1,0) Higgs
    coefficient to phi = r * phicoef."""
    R = _rmesh(grid)
    A0 = np.asarray(A0, dtype=complex)
    B0 = A0 if kappa == 0.0 else A0 - 1j * kappa / R
    phi = R * np.asarray(phicoef, dtype=complex)
    return WittenData(grid, B0, np.asarray(A1, dtype=complex), phi, float(kappa))


def witten_from_psi(grid, psi, kappa):
    """WittenData of a curved Liouville potential, in the printed gauge
    B = (psi_z/2 - i(kappa-1)/2r) dz - (psi_zbar/2 + i(kappa-1)/2r) dzbar
    with phi = e^{psi/2}; no numerical gauge fixing involved."""
    R = _rmesh(grid)
    psi = np.asarray(psi, dtype=float)
    dz, dzb = gf.wirtinger(grid, psi)
    off = 0.5j * (kappa - 1.0) / R
    Bz = 0.5 * dz - off
    Bzb = -0.5 * dzb - off
    phi = np.exp(0.5 * psi).astype(complex)
    return WittenData(grid, Bz + Bzb, 1j * (Bz - Bzb), phi, float(kappa), psi=psi)


def eq51_residual(wd):
    """Two reduced-system residuals:

    r1 = i r^2 (d0 B1 - d1 B0) - (kappa - 4 phi conj(phi))
    r2 = (dbar + B_zbar) phi + i (kappa - 1) phi / (2r)
    """
    g = wd.grid
    R = _rmesh(g)
    core = (1j * R**2 * (gf.diff(g, wd.B1, 0) - gf.diff(g, wd.B0, 1))
            + 4.0 * wd.phi * np.conj(wd.phi))
    r1 = core - wd.kappa
    r2 = (gf.wirtinger(g, wd.phi)[1] + wd.Bzb * wd.phi
          + 0.5j * (wd.kappa - 1.0) / R * wd.phi)
    return r1, r2


def curved_liouville_residual(grid, psi):
    """r^2 laplacian(psi) + 2 - 8 e^psi."""
    R = _rmesh(grid)
    return R**2 * gf.laplacian(grid, np.asarray(psi, dtype=float)) + 2.0 - 8.0 * np.exp(psi)


def sdym_residual(wd):
    """Cylindrically reduced self-dual Yang-Mills residuals at kappa = 1.

    With W = iB (real) and 2 phi = phi1 + i phi2:
        s1 = r^2 (d0 W1 - d1 W0) - 1 + phi1^2 + phi2^2
        s2 = d0 phi1 + W0 phi2 - d1 phi2 + W1 phi1
        s3 = d1 phi1 + W1 phi2 + d0 phi2 - W0 phi1
    s2 and s3 are the real and imaginary parts of the kappa = 1 scalar
    line; s1 only reduces to it at that weight, hence the precondition.
    """
    if wd.kappa != 1.0:
        raise ValueError("reduced self-dual form requires kappa = 1")
    g = wd.grid
    R = _rmesh(g)
    W0, W1 = wd.W0, wd.W1
    p1, p2 = wd.phi1, wd.phi2
    s1 = R**2 * (gf.diff(g, W1, 0) - gf.diff(g, W0, 1)) - 1.0 + p1**2 + p2**2
    s2 = gf.diff(g, p1, 0) + W0 * p2 - gf.diff(g, p2, 1) + W1 * p1
    s3 = gf.diff(g, p1, 1) + W1 * p2 + gf.diff(g, p2, 0) - W0 * p1
    return s1, s2, s3
