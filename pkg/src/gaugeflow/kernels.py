"""Path-ordered integration kernels for dg = g J_mu dx^mu.

The sweep integrates along the base column (grid axis 1 through the base
node), then along every row (axis 0), RK4 per step with the connection
linearly interpolated between nodes, projecting g back onto the group after
each step.  The largest pre-projection group defect is returned as `drift`.

Two interchangeable backends:
    numba  - njit loops, scalar-unrolled 2x2 arithmetic (default if numba
             imports cleanly)
    numpy  - same math, batched across rows with np.matmul
selected by env GAUGEFLOW_KERNELS or set_backend().  Results agree to
roundoff; benchmarks/bench_kernels.py compares speed.

kind: 0 projects onto SU(2) ([[a,b],[-conj b, conj a]] span), 1 onto
SU(1,1) ([[a,b],[conj b, conj a]] span).
"""

from __future__ import annotations

import os
import numpy as np

try:
    from numba import njit
    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - environment without numba
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f
        if args and callable(args[0]):
            return args[0]
        return wrap

DRIFT_BOUND = 1e-6


class DriftError(RuntimeError):
    """Group defect of the path-ordered integration exceeded the bound."""


_BACKEND = None


def available_backends():
    return ("numba", "numpy") if _HAVE_NUMBA else ("numpy",)


def get_backend():
    global _BACKEND
    if _BACKEND is None:
        choice = os.environ.get("GAUGEFLOW_KERNELS", "").strip().lower()
        if choice == "":
            choice = "numba" if _HAVE_NUMBA else "numpy"
        set_backend(choice)
    return _BACKEND


def set_backend(name):
    global _BACKEND
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown kernel backend {name!r}")
    if name == "numba" and not _HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not importable")
    _BACKEND = name


# ---------------------------------------------------------------------------
# numba backend: scalar-unrolled 2x2 complex arithmetic

@njit(cache=True)
def _project_nb(a, b, c, d, kind):
    det = a * d - b * c
    defect = abs(det - 1.0)
    if kind == 0:
        e00 = abs(a) ** 2 + abs(c) ** 2 - 1.0
        e11 = abs(b) ** 2 + abs(d) ** 2 - 1.0
        e01 = np.conj(a) * b + np.conj(c) * d
        m = abs(e00)
        if abs(e11) > m:
            m = abs(e11)
        if abs(e01) > m:
            m = abs(e01)
        if m > defect:
            defect = m
        p = 0.5 * (a + np.conj(d))
        q = 0.5 * (b - np.conj(c))
        n2 = abs(p) ** 2 + abs(q) ** 2
        if n2 <= 0.0:
            return a, b, c, d, 1e30
        n = np.sqrt(n2)
        return p / n, q / n, -np.conj(q) / n, np.conj(p) / n, defect
    else:
        e00 = abs(a) ** 2 - abs(c) ** 2 - 1.0
        e11 = abs(b) ** 2 - abs(d) ** 2 + 1.0
        e01 = np.conj(a) * b - np.conj(c) * d
        m = abs(e00)
        if abs(e11) > m:
            m = abs(e11)
        if abs(e01) > m:
            m = abs(e01)
        if m > defect:
            defect = m
        p = 0.5 * (a + np.conj(d))
        q = 0.5 * (b + np.conj(c))
        n2 = abs(p) ** 2 - abs(q) ** 2
        if n2 <= 0.0:
            return a, b, c, d, 1e30
        n = np.sqrt(n2)
        return p / n, q / n, np.conj(q) / n, np.conj(p) / n, defect


@njit(cache=True)
def _rk4_nb(a, b, c, d, A0, A1, A2, A3, B0, B1, B2, B3, h):
    # J linearly interpolated: endpoints A, B; midpoint their average
    M0 = 0.5 * (A0 + B0)
    M1 = 0.5 * (A1 + B1)
    M2 = 0.5 * (A2 + B2)
    M3 = 0.5 * (A3 + B3)

    k1a = a * A0 + b * A2
    k1b = a * A1 + b * A3
    k1c = c * A0 + d * A2
    k1d = c * A1 + d * A3

    ta = a + 0.5 * h * k1a
    tb = b + 0.5 * h * k1b
    tc = c + 0.5 * h * k1c
    td = d + 0.5 * h * k1d
    k2a = ta * M0 + tb * M2
    k2b = ta * M1 + tb * M3
    k2c = tc * M0 + td * M2
    k2d = tc * M1 + td * M3

    ta = a + 0.5 * h * k2a
    tb = b + 0.5 * h * k2b
    tc = c + 0.5 * h * k2c
    td = d + 0.5 * h * k2d
    k3a = ta * M0 + tb * M2
    k3b = ta * M1 + tb * M3
    k3c = tc * M0 + td * M2
    k3d = tc * M1 + td * M3

    ta = a + h * k3a
    tb = b + h * k3b
    tc = c + h * k3c
    td = d + h * k3d
    k4a = ta * B0 + tb * B2
    k4b = ta * B1 + tb * B3
    k4c = tc * B0 + td * B2
    k4d = tc * B1 + td * B3

    s = h / 6.0
    return (a + s * (k1a + 2.0 * k2a + 2.0 * k3a + k4a),
            b + s * (k1b + 2.0 * k2b + 2.0 * k3b + k4b),
            c + s * (k1c + 2.0 * k2c + 2.0 * k3c + k4c),
            d + s * (k1d + 2.0 * k2d + 2.0 * k3d + k4d))


@njit(cache=True)
def _sweep_nb(J0, J1, hx, hy, bi, bj, g0, kind):
    nx, ny = J0.shape[0], J0.shape[1]
    G = np.empty((nx, ny, 2, 2), np.complex128)
    drift = 0.0

    a, b, c, d = g0[0, 0], g0[0, 1], g0[1, 0], g0[1, 1]
    a, b, c, d, dd = _project_nb(a, b, c, d, kind)
    if dd > drift:
        drift = dd
    G[bi, bj, 0, 0] = a
    G[bi, bj, 0, 1] = b
    G[bi, bj, 1, 0] = c
    G[bi, bj, 1, 1] = d

    # base column: axis 1, both directions from the base node
    for direction in (-1, 1):
        a, b, c, d = G[bi, bj, 0, 0], G[bi, bj, 0, 1], G[bi, bj, 1, 0], G[bi, bj, 1, 1]
        j = bj
        while 0 <= j + direction < ny:
            jn = j + direction
            a, b, c, d = _rk4_nb(
                a, b, c, d,
                J1[bi, j, 0, 0], J1[bi, j, 0, 1], J1[bi, j, 1, 0], J1[bi, j, 1, 1],
                J1[bi, jn, 0, 0], J1[bi, jn, 0, 1], J1[bi, jn, 1, 0], J1[bi, jn, 1, 1],
                direction * hy)
            a, b, c, d, dd = _project_nb(a, b, c, d, kind)
            if dd > drift:
                drift = dd
            G[bi, jn, 0, 0] = a
            G[bi, jn, 0, 1] = b
            G[bi, jn, 1, 0] = c
            G[bi, jn, 1, 1] = d
            j = jn

    # rows: axis 0 from the base column, both directions, per column node
    for j in range(ny):
        for direction in (-1, 1):
            a, b, c, d = G[bi, j, 0, 0], G[bi, j, 0, 1], G[bi, j, 1, 0], G[bi, j, 1, 1]
            i = bi
            while 0 <= i + direction < nx:
                inn = i + direction
                a, b, c, d = _rk4_nb(
                    a, b, c, d,
                    J0[i, j, 0, 0], J0[i, j, 0, 1], J0[i, j, 1, 0], J0[i, j, 1, 1],
                    J0[inn, j, 0, 0], J0[inn, j, 0, 1], J0[inn, j, 1, 0], J0[inn, j, 1, 1],
                    direction * hx)
                a, b, c, d, dd = _project_nb(a, b, c, d, kind)
                if dd > drift:
                    drift = dd
                G[inn, j, 0, 0] = a
                G[inn, j, 0, 1] = b
                G[inn, j, 1, 0] = c
                G[inn, j, 1, 1] = d
                i = inn
    return G, drift


# ---------------------------------------------------------------------------
# numpy backend: same math, rows batched

def _project_np(g, kind):
    det = g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] * g[..., 1, 0]
    defect = np.abs(det - 1.0)
    a, b = g[..., 0, 0], g[..., 0, 1]
    c, d = g[..., 1, 0], g[..., 1, 1]
    if kind == 0:
        defect = np.maximum(defect, np.abs(np.abs(a) ** 2 + np.abs(c) ** 2 - 1.0))
        defect = np.maximum(defect, np.abs(np.abs(b) ** 2 + np.abs(d) ** 2 - 1.0))
        defect = np.maximum(defect, np.abs(np.conj(a) * b + np.conj(c) * d))
        p = 0.5 * (a + np.conj(d))
        q = 0.5 * (b - np.conj(c))
        n2 = np.abs(p) ** 2 + np.abs(q) ** 2
    else:
        defect = np.maximum(defect, np.abs(np.abs(a) ** 2 - np.abs(c) ** 2 - 1.0))
        defect = np.maximum(defect, np.abs(np.abs(b) ** 2 - np.abs(d) ** 2 + 1.0))
        defect = np.maximum(defect, np.abs(np.conj(a) * b - np.conj(c) * d))
        p = 0.5 * (a + np.conj(d))
        q = 0.5 * (b + np.conj(c))
        n2 = np.abs(p) ** 2 - np.abs(q) ** 2
    bad = n2 <= 0.0
    if np.any(bad):
        return g, 1e30
    n = np.sqrt(n2)
    out = np.empty_like(g)
    out[..., 0, 0] = p / n
    out[..., 0, 1] = q / n
    out[..., 1, 0] = (-np.conj(q) if kind == 0 else np.conj(q)) / n
    out[..., 1, 1] = np.conj(p) / n
    return out, float(defect.max())


def _rk4_np(g, JA, JB, h):
    JM = 0.5 * (JA + JB)
    k1 = g @ JA
    k2 = (g + (0.5 * h) * k1) @ JM
    k3 = (g + (0.5 * h) * k2) @ JM
    k4 = (g + h * k3) @ JB
    return g + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _sweep_np(J0, J1, hx, hy, bi, bj, g0, kind):
    nx, ny = J0.shape[:2]
    G = np.empty((nx, ny, 2, 2), np.complex128)
    g, drift = _project_np(np.asarray(g0, dtype=complex), kind)
    G[bi, bj] = g

    for direction in (-1, 1):
        g = G[bi, bj].copy()
        j = bj
        while 0 <= j + direction < ny:
            jn = j + direction
            g = _rk4_np(g, J1[bi, j], J1[bi, jn], direction * hy)
            g, dd = _project_np(g, kind)
            drift = max(drift, dd)
            G[bi, jn] = g
            j = jn

    for direction in (-1, 1):
        g = G[bi, :].copy()  # (ny, 2, 2) batch, one state per row
        i = bi
        while 0 <= i + direction < nx:
            inn = i + direction
            g = _rk4_np(g, J0[i], J0[inn], direction * hx)
            g, dd = _project_np(g, kind)
            drift = max(drift, dd)
            G[inn] = g
            i = inn
    return G, drift


# ---------------------------------------------------------------------------

def path_sweep(J0, J1, hx, hy, base, g0=None, kind=0, first_axis=1,
               drift_bound=DRIFT_BOUND):
    """Integrate dg = g J along base-line-then-cross-lines paths.

    J0, J1: (nx, ny, 2, 2) complex connection components per grid axis.
    base: (bi, bj) node indices where g = g0 (default identity).
    first_axis: which axis the base line runs along (1 = base column).
    Returns (G, drift); raises DriftError beyond drift_bound.
    """
    J0 = np.ascontiguousarray(J0, dtype=np.complex128)
    J1 = np.ascontiguousarray(J1, dtype=np.complex128)
    if J0.shape != J1.shape or J0.shape[2:] != (2, 2):
        raise ValueError("J components must share shape (nx, ny, 2, 2)")
    bi, bj = base
    if g0 is None:
        g0 = np.eye(2, dtype=complex)
    g0 = np.ascontiguousarray(g0, dtype=np.complex128)
    if first_axis == 0:
        # run the generic kernel on the transposed problem
        Gt, drift = path_sweep(J1.transpose(1, 0, 2, 3), J0.transpose(1, 0, 2, 3),
                               hy, hx, (bj, bi), g0, kind, first_axis=1,
                               drift_bound=drift_bound)
        return Gt.transpose(1, 0, 2, 3), drift
    if first_axis != 1:
        raise ValueError("first_axis must be 0 or 1")
    if not (0 <= bi < J0.shape[0] and 0 <= bj < J0.shape[1]):
        raise ValueError("base node outside grid")

    if get_backend() == "numba":
        G, drift = _sweep_nb(J0, J1, float(hx), float(hy), int(bi), int(bj),
                             g0, int(kind))
    else:
        G, drift = _sweep_np(J0, J1, float(hx), float(hy), int(bi), int(bj),
                             g0, int(kind))
    if drift > drift_bound:
        raise DriftError(
            f"group defect {drift:.3e} exceeds {drift_bound:.1e}; "
            "step size too coarse for the connection data")
    return G, float(drift)


def warmup():
    """Trigger JIT compilation of the numba kernel on a tiny problem."""
    if get_backend() != "numba":
        return
    J = np.zeros((5, 5, 2, 2), dtype=np.complex128)
    path_sweep(J, J, 0.1, 0.1, (2, 2))
