"""Constrained models on the complex plane built from spin-gauge pairs.

Self-duality residuals for sphere-valued fields, the Liouville solutions
generated by rational maps, the conformal sinh-Gordon system with its
spectral and rotation families, and the light-cone sine-Gordon system.
Residuals are finite-difference fields meant to vanish at second order on
solutions; algebraic identities between them hold to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import grid_fields as gf
from . import sigma_gauge as sg

EPS_MASK = 1e-6


# ---------------------------------------------------------------------------
# Self-duality and conformal harmonicity

def selfdual_residual(grid, S, sign):
    """d_x S - sign * (S x d_y S).

    sign=-1 vanishes on spin fields of holomorphic maps, sign=+1 on those
    of antiholomorphic ones; a generic S fails both.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return gf.diff(grid, S, 0) - sign * np.cross(S, gf.diff(grid, S, 1))


def harmonic_residual(grid, S):
    """S x laplacian(S); zero for conformal-harmonic spin fields."""
    return np.cross(S, gf.laplacian(grid, S))


# ---------------------------------------------------------------------------
# Liouville

@dataclass(frozen=True)
class LiouvilleSolution:
    grid: gf.Grid2
    phi: np.ndarray
    mask: np.ndarray        # critical nodes where phi blew down; clipped there
    source: sg.RationalMap


def liouville_from_map(zeta, grid, eps_mask=EPS_MASK):
    """log(|zeta'|^2 / (1 + |zeta|^2)^2) sampled pole-free.

    Written projectively: for zeta = n/d the density is |W|^2 / Sigma^2 with
    W the numerator Wronskian and Sigma = |n|^2 + |d|^2, finite across poles
    of zeta.  Nodes with |W| < eps_mask * Sigma are masked and phi is
    clipped there rather than trusted.
    """
    if zeta.degree == 0:
        raise ValueError("constant map has no Liouville density")
    Z = grid.zmesh()
    n, d = zeta.nd_values(Z)
    W = zeta.wronskian(Z)
    sigma = np.abs(n) ** 2 + np.abs(d) ** 2
    mask = np.abs(W) < eps_mask * sigma
    dens = (np.abs(W) / sigma) ** 2
    phi = np.log(np.maximum(dens, 1e-300))
    return LiouvilleSolution(grid, phi, mask, zeta)


def liouville_residual(grid, phi):
    """-laplacian(phi) - 8 e^phi."""
    return -gf.laplacian(grid, phi) - 8.0 * np.exp(phi)


def liouville_gauge(grid, phi):
    """Abelian pair of a Liouville field: A_z = phi_z/2, q_z = e^{phi/2},
    q_zbar = 0.  Feed to u1_system_residual to test the input."""
    fz, fzb = gf.wirtinger(grid, phi)
    qz = np.exp(0.5 * np.asarray(phi, dtype=float)).astype(complex)
    return sg.gauge_from_z_parts(grid, qz, np.zeros_like(qz),
                                 0.5 * fz, -0.5 * fzb)


def u1_system_residual(gd):
    """Residual triple of the abelian constrained system.

    Returns (curvature line, dbar-analyticity line on q_z, d-line on
    q_zbar).  The curvature line equals a fixed fraction of the scalar
    model residual by construction, so it doubles as a solution test.
    """
    qz, qzb, Az, Azb = gd.z_parts()
    g = gd.grid
    rF = (gf.wirtinger(g, Azb)[0] - gf.wirtinger(g, Az)[1]
          - 2.0 * (np.abs(qz) ** 2 - np.abs(qzb) ** 2))
    r1 = gf.wirtinger(g, qz)[1] + Azb * qz
    r2 = gf.wirtinger(g, qzb)[0] + Az * qzb
    return rF, r1, r2


# ---------------------------------------------------------------------------
# Conformal sinh-Gordon

@dataclass(frozen=True)
class ShGData:
    grid: gf.Grid2
    phi: np.ndarray
    U: np.ndarray                  # entire-function samples
    k: Optional[int] = None        # set when U = z^k exactly
    lam: complex = 1.0 + 0.0j      # spectral point

    @property
    def u(self):
        return np.abs(self.U) ** 2


def monomial_field(grid, k):
    return grid.zmesh() ** k


def shg_data_monomial(grid, phi, k, lam=1.0):
    """ShGData with U = z^k sampled exactly."""
    if k < 0:
        raise ValueError("monomial exponent must be >= 0")
    return ShGData(grid, np.asarray(phi, dtype=float),
                   monomial_field(grid, k), int(k), complex(lam))


def shg_residual(d):
    """(-laplacian(phi) - 8(|U|^2 e^phi - e^-phi), dbar U)."""
    g = d.grid
    res = (-gf.laplacian(g, d.phi)
           - 8.0 * (d.u * np.exp(d.phi) - np.exp(-d.phi)))
    return res, gf.wirtinger(g, d.U)[1]


def shg_gauge(d):
    """Abelian pair: A_z = phi_z/2, q_z = U e^{phi/2}, q_zbar = e^{-phi/2}."""
    g = d.grid
    fz, fzb = gf.wirtinger(g, d.phi)
    ep = np.exp(0.5 * d.phi)
    qz = d.U * ep
    qzb = (1.0 / ep).astype(complex)
    return sg.gauge_from_z_parts(g, qz, qzb, 0.5 * fz, -0.5 * fzb)


def _mat2(a, b, c, d):
    a, b, c, d = np.broadcast_arrays(a, b, c, d)
    out = np.empty(a.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = a
    out[..., 0, 1] = b
    out[..., 1, 0] = c
    out[..., 1, 1] = d
    return out


def zero_curvature_z(grid, Mz, Mzb):
    """dbar M_z - d M_zbar - [M_z, M_zbar], entrywise on 2x2 fields."""
    dMz = gf.wirtinger(grid, Mz)[1]
    dMzb = gf.wirtinger(grid, Mzb)[0]
    return dMz - dMzb - (Mz @ Mzb - Mzb @ Mz)


def shg_lax(d):
    """Spectral connection pair (M_z, M_zbar) and its curvature residual.

    The (1,1) residual entry equals shg_residual/8 identically; the
    off-diagonal entries carry the analyticity defect of U scaled by lam
    and 1/lam.
    """
    lam = complex(d.lam)
    if lam == 0:
        raise ValueError("spectral point must be nonzero")
    g = d.grid
    pz, pzb = gf.wirtinger(g, d.phi)
    ep = np.exp(0.5 * d.phi)
    em = np.exp(-0.5 * d.phi)
    Mz = _mat2(-0.25 * pz, -em, lam * d.U * ep, 0.25 * pz)
    Mzb = _mat2(0.25 * pzb, -(1.0 / lam) * np.conj(d.U) * ep,
                em, -0.25 * pzb)
    return Mz, Mzb, zero_curvature_z(g, Mz, Mzb)


def shg_rotate(d, theta):
    """Rotation family member: phi resampled at e^{i theta} z (bicubic),
    U = z^k kept, spectral point multiplied by e^{-(k+2) i theta}.

    Returns (data, mask); the mask flags nodes whose source point left the
    grid, where the resample is a nearest-edge extension.
    """
    if d.k is None:
        raise ValueError("rotation family needs monomial U = z^k")
    g = d.grid
    Z = g.zmesh() * np.exp(1j * theta)
    vals, outside = gf.interp_bicubic(g, d.phi, Z.real, Z.imag)
    lam = d.lam * np.exp(-1j * (d.k + 2) * theta)
    return ShGData(g, vals, monomial_field(g, d.k), d.k, lam), outside


def conformal_transform(d, f, out_grid=None):
    """Pull back along an analytic map fixing the origin.

    phi picks up -2 log|f'| so the equation is preserved, with
    U -> U(f) (f')^2; f' must not vanish on the grid.  Returns
    (data, mask) with the mask flagging nodes mapped off the source grid.
    """
    g = out_grid if out_grid is not None else d.grid
    if abs(complex(f(0.0 + 0.0j))) > 1e-12:
        raise ValueError("map must fix the origin")
    Z = g.zmesh()
    w = f(Z)
    fp = f.deriv(Z)
    if np.abs(fp).min() < 1e-12:
        raise ValueError("map derivative vanishes on the grid")
    vals, outside = gf.interp_bicubic(d.grid, d.phi, w.real, w.imag)
    phi_t = vals - 2.0 * np.log(np.abs(fp))
    if d.k is not None:
        Uf = w ** d.k
    else:
        re, out_re = gf.interp_bicubic(d.grid, d.U.real, w.real, w.imag)
        im, out_im = gf.interp_bicubic(d.grid, d.U.imag, w.real, w.imag)
        Uf = re + 1j * im
        outside = outside | out_re | out_im
    return ShGData(g, phi_t, Uf * fp ** 2, None, d.lam), outside


# ---------------------------------------------------------------------------
# Light-cone sine-Gordon

def dplus(grid, f):
    """(d_t + d_x)/2 with axis 0 as t."""
    return 0.5 * (gf.diff(grid, f, 0) + gf.diff(grid, f, 1))


def dminus(grid, f):
    """(d_t - d_x)/2 with axis 0 as t."""
    return 0.5 * (gf.diff(grid, f, 0) - gf.diff(grid, f, 1))


@dataclass(frozen=True)
class SGData:
    grid: gf.Grid2             # axis 0 = t, axis 1 = x; needs hx == hy
    Phi: np.ndarray
    rp: np.ndarray             # r_+ samples on the t+x diagonal lattice
    rm: np.ndarray             # r_- samples on the t-x diagonal lattice
    m: Optional[float] = None
    lam: complex = 1.0 + 0.0j

    def node_fields(self):
        """(r_+, r_-, W) on grid nodes via the exact diagonal indexing."""
        i = np.arange(self.grid.nx)[:, None]
        j = np.arange(self.grid.ny)[None, :]
        Rp = self.rp[i + j]
        Rm = self.rm[i - j + self.grid.ny - 1]
        return Rp, Rm, np.log(Rp) + np.log(Rm)


def sg_data(grid, Phi, rplus, rminus, m=None, lam=1.0):
    """SGData with r± sampled from callables of t+x and t-x.

    Equal spacings are required so t±x live on exact 1d lattices; the
    null-derivative constraints then hold to rounding on interior nodes,
    not just to stencil order.
    """
    if abs(grid.hx - grid.hy) > 1e-12 * max(grid.hx, grid.hy):
        raise ValueError("light-cone sampling needs hx == hy")
    h = grid.hx
    npts = grid.nx + grid.ny - 1
    tp = grid.xs[0] + grid.ys[0] + h * np.arange(npts)
    tm = grid.xs[0] - grid.ys[-1] + h * np.arange(npts)
    rp = np.asarray(rplus(tp), dtype=float)
    rm = np.asarray(rminus(tm), dtype=float)
    if (rp <= 0).any() or (rm <= 0).any():
        raise ValueError("r± must be positive on the sampled range")
    return SGData(grid, np.asarray(Phi, dtype=float), rp, rm, m, complex(lam))


def sg_residual(d):
    """(d+ d- Phi + 4 e^W sin Phi, d+ d- W)."""
    g = d.grid
    _, _, W = d.node_fields()
    r1 = dplus(g, dminus(g, d.Phi)) + 4.0 * np.exp(W) * np.sin(d.Phi)
    r2 = dplus(g, dminus(g, W))
    return r1, r2


def sg_gauge(d):
    """Abelian pair A = -i (d- Phi) dt^-, s = r+ e^{i Phi} dt^+ + r- dt^-.

    Returns (GaugeData in (t, x) components, residual triple): curvature
    line, d+ line on s_-, covariant d- line on s_+.  The curvature line is
    -i times the first sg_residual component up to rounding.
    """
    g = d.grid
    Rp, Rm, _ = d.node_fields()
    dmPhi = dminus(g, d.Phi)
    Am = -1j * dmPhi
    sp_ = Rp * np.exp(1j * d.Phi)
    sm_ = Rm.astype(complex)
    V = np.stack([dmPhi, -dmPhi], axis=-1)
    q = np.stack([sp_ + sm_, sp_ - sm_], axis=-1)
    gd = sg.GaugeData(g, V, q, "su2")
    rF = dplus(g, Am) - 2.0 * (sp_ * np.conj(sm_) - sm_ * np.conj(sp_))
    r2 = dplus(g, sm_)
    r3 = dminus(g, sp_) + Am * sp_
    return gd, (rF, r2, r3)


def sg_lax(grid, Phi, m, lam):
    """Constant-background spectral pair (M+, M-) and curvature residual.

    The (1,1) residual entry is -i/2 times the equation residual for
    e^W = m^2.
    """
    lam = complex(lam)
    if lam == 0:
        raise ValueError("spectral point must be nonzero")
    if m <= 0:
        raise ValueError("mass must be positive")
    m2 = float(m) ** 2
    Phi = np.asarray(Phi, dtype=float)
    eip = np.exp(1j * Phi)
    zero = np.zeros_like(Phi)
    Mp = _mat2(zero, -(m2 / lam) * np.conj(eip), (m2 / lam) * eip, zero)
    dmPhi = dminus(grid, Phi)
    Mm = _mat2(0.5j * dmPhi, np.full_like(Phi, -lam, dtype=complex),
               np.full_like(Phi, lam, dtype=complex), -0.5j * dmPhi)
    R = dminus(grid, Mp) - dplus(grid, Mm) - (Mp @ Mm - Mm @ Mp)
    return Mp, Mm, R


def sine_gordon_kink(grid, m, x0=0.0):
    """Static kink of the constant-background equation, extended along t."""
    _, X = grid.mesh()
    return 4.0 * np.arctan(np.exp(4.0 * m * (X - x0)))
