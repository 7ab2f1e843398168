"""Rectangular 2D grids and sampled fields: finite differences, Wirtinger
derivatives, residual norms, convergence orders, CSV field dumps.

Layout convention: arrays are indexed [i, j] with i along grid axis 0
(label axis_labels[0], spacing hx) and j along axis 1.  Extra trailing axes
(vector components, 2x2 matrices) ride along untouched.  CSV dumps are
row-major with the axis-0 coordinate fastest.

All second derivatives used anywhere in this package are compositions of
the first-derivative stencil (diff applied twice).  That choice makes the
discrete identities 4 d_z d_zbar = laplacian and d_+ d_- = (d_t^2 - d_x^2)/4
hold exactly in floating point, so curvature residuals stay exactly
proportional to equation residuals.  The price is a stencil reach of 2
cells, covered by the default residual margin.
"""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np

STENCIL_REACH = 2  # cells touched by composed second-derivative stencils


@dataclass(frozen=True)
class Grid2:
    """Uniform rectangular grid with nx*ny nodes.

    Axis 0 runs x0, x0+hx, ...; axis 1 runs y0, y0+hy, ....  axis_labels
    names the two coordinates, e.g. ("x", "y") or ("t", "x").
    """
    nx: int
    ny: int
    x0: float
    y0: float
    hx: float
    hy: float
    axis_labels: tuple = ("x", "y")

    def __post_init__(self):
        if self.nx < 5 or self.ny < 5:
            raise ValueError("grids need at least 5 nodes per axis")
        if self.hx <= 0 or self.hy <= 0:
            raise ValueError("grid spacings must be positive")
        if len(self.axis_labels) != 2:
            raise ValueError("axis_labels must name exactly two axes")

    @property
    def shape(self):
        return (self.nx, self.ny)

    @property
    def xs(self):
        return self.x0 + self.hx * np.arange(self.nx)

    @property
    def ys(self):
        return self.y0 + self.hy * np.arange(self.ny)

    def mesh(self):
        return np.meshgrid(self.xs, self.ys, indexing="ij")

    def zmesh(self):
        X, Y = self.mesh()
        return X + 1j * Y

    @property
    def base_index(self):
        """Indices of the node nearest the coordinate origin (ties: lower index)."""
        return (int(np.argmin(np.abs(self.xs))), int(np.argmin(np.abs(self.ys))))

    @property
    def base_point(self):
        bi, bj = self.base_index
        return (self.xs[bi], self.ys[bj])

    def spacing(self, axis):
        if axis == 0:
            return self.hx
        if axis == 1:
            return self.hy
        raise ValueError("axis must be 0 or 1")

    def refine(self):
        """Same extent, halved spacing: nodes 2n-1 per axis."""
        return Grid2(2 * self.nx - 1, 2 * self.ny - 1, self.x0, self.y0,
                     self.hx / 2.0, self.hy / 2.0, self.axis_labels)


def square_grid(n, lo, hi, labels=("x", "y")):
    """Convenience n x n grid on [lo, hi]^2."""
    h = (hi - lo) / (n - 1)
    return Grid2(n, n, lo, lo, h, h, labels)


def rect_grid(n0, lo0, hi0, n1, lo1, hi1, labels=("x", "y")):
    return Grid2(n0, n1, lo0, lo1, (hi0 - lo0) / (n0 - 1),
                 (hi1 - lo1) / (n1 - 1), labels)


def _sl(ndim, axis, a, b):
    idx = [slice(None)] * ndim
    idx[axis] = slice(a, b)
    return tuple(idx)


def diff(grid, f, axis):
    """Second-order first derivative along a grid axis.

    Central stencil in the interior, one-sided second-order rows at the two
    boundaries; exact for polynomials of degree <= 2 along the axis.
    Trailing axes of f are broadcast.
    """
    if axis not in (0, 1):
        raise ValueError("axis must be 0 or 1")
    f = np.asarray(f)
    if f.shape[:2] != grid.shape:
        raise ValueError(f"field shape {f.shape} does not match grid {grid.shape}")
    h = grid.spacing(axis)
    nd = f.ndim
    out = np.empty_like(f, dtype=np.result_type(f.dtype, np.float64))
    out[_sl(nd, axis, 1, -1)] = (f[_sl(nd, axis, 2, None)]
                                 - f[_sl(nd, axis, 0, -2)]) / (2.0 * h)
    out[_sl(nd, axis, 0, 1)] = (-3.0 * f[_sl(nd, axis, 0, 1)]
                                + 4.0 * f[_sl(nd, axis, 1, 2)]
                                - f[_sl(nd, axis, 2, 3)]) / (2.0 * h)
    out[_sl(nd, axis, -1, None)] = (3.0 * f[_sl(nd, axis, -1, None)]
                                    - 4.0 * f[_sl(nd, axis, -2, -1)]
                                    + f[_sl(nd, axis, -3, -2)]) / (2.0 * h)
    return out


def diff4(grid, f, axis):
    """First derivative, 4th-order central in the interior.

    Same reach-2 footprint as diff: the outermost two layers per side fall
    back to the diff stencils (2nd order), so only nodes with margin >= 2
    see the higher order.  Used where quadrature accuracy is driven by the
    derivative error, e.g. the topological charge density.
    """
    h = grid.spacing(axis)
    f = np.asarray(f)
    nd = f.ndim
    out = np.asarray(diff(grid, f, axis))
    out[_sl(nd, axis, 2, -2)] = (-f[_sl(nd, axis, 4, None)]
                                 + 8.0 * f[_sl(nd, axis, 3, -1)]
                                 - 8.0 * f[_sl(nd, axis, 1, -3)]
                                 + f[_sl(nd, axis, 0, -4)]) / (12.0 * h)
    return out


def diff2(grid, f, axis):
    """Composed second derivative diff(diff(f)) along one axis."""
    return diff(grid, diff(grid, f, axis), axis)


def laplacian(grid, f):
    """diff2 along axis 0 plus diff2 along axis 1 (composed stencils)."""
    return diff2(grid, f, 0) + diff2(grid, f, 1)


def wirtinger(grid, f):
    """(d_z f, d_zbar f) for z = axis0 + i*axis1, from diff."""
    f = np.asarray(f, dtype=complex)
    d0 = diff(grid, f, 0)
    d1 = diff(grid, f, 1)
    return 0.5 * (d0 - 1j * d1), 0.5 * (d0 + 1j * d1)


def interior_mask(grid, margin=STENCIL_REACH, exclude=None):
    """Boolean mask of nodes at least `margin` cells from every boundary,
    minus any `exclude` mask."""
    keep = np.ones(grid.shape, dtype=bool)
    if margin > 0:
        keep[:margin, :] = False
        keep[-margin:, :] = False
        keep[:, :margin] = False
        keep[:, -margin:] = False
    if exclude is not None:
        keep &= ~exclude
    return keep


def norms(grid, f, margin=STENCIL_REACH, mask=None):
    """(Linf, L2) over interior nodes, L2 with cell weights hx*hy.

    `mask` marks nodes to exclude.  Fields with trailing axes contribute
    all components (Linf: max over components, L2: Frobenius-style sum).
    """
    f = np.asarray(f)
    keep = interior_mask(grid, margin, mask)
    if not keep.any():
        raise ValueError("no nodes left after margin/mask exclusion")
    mag = np.abs(f.reshape(grid.nx, grid.ny, -1))
    magkeep = mag[keep]
    linf = float(magkeep.max())
    l2 = float(np.sqrt((magkeep ** 2).sum() * grid.hx * grid.hy))
    return linf, l2


def order_estimate(r_h, r_h2):
    """log2(r_h / r_h2): observed convergence order between h and h/2 runs."""
    if r_h <= 0.0 or r_h2 <= 0.0:
        raise ValueError("order estimate needs positive residual norms")
    return float(np.log2(r_h / r_h2))


def dilate_mask(grid, mask, radius):
    """Extend a node mask to all nodes strictly within physical `radius`
    of a masked node (Euclidean, in grid coordinates)."""
    if mask is None or not mask.any() or radius <= 0:
        return mask
    X, Y = grid.mesh()
    out = mask.copy()
    ii, jj = np.nonzero(mask)
    for i, j in zip(ii, jj):
        d2 = (X - grid.xs[i]) ** 2 + (Y - grid.ys[j]) ** 2
        out |= d2 < radius ** 2
    return out


def dilate_mask_cells(mask, cells=STENCIL_REACH):
    """Box-dilate a node mask by `cells` nodes per axis (stencil pollution)."""
    if mask is None or not mask.any() or cells <= 0:
        return mask
    out = mask.copy()
    for _ in range(cells):
        grown = out.copy()
        grown[1:, :] |= out[:-1, :]
        grown[:-1, :] |= out[1:, :]
        grown[:, 1:] |= out[:, :-1]
        grown[:, :-1] |= out[:, 1:]
        out = grown
    return out


# ---------------------------------------------------------------------------
# CSV field dumps

def dump_csv(path, grid, columns):
    """Write fields as CSV: header `<label0>,<label1>,<names...>`, one node
    per line, axis-0 coordinate fastest, 17 significant digits.

    columns: dict name -> real array of grid shape.  Complex fields must be
    split by the caller into _re/_im pairs.
    """
    X, Y = grid.mesh()
    cols = [X, Y]
    names = list(grid.axis_labels)
    for name, arr in columns.items():
        arr = np.asarray(arr)
        if arr.shape != grid.shape:
            raise ValueError(f"column {name!r} has shape {arr.shape}, want {grid.shape}")
        if np.iscomplexobj(arr):
            raise ValueError(f"column {name!r} is complex; split into _re/_im")
        cols.append(arr)
        names.append(name)
    # axis-0 fastest: transpose before ravel
    data = np.column_stack([np.asarray(c, dtype=float).T.ravel() for c in cols])
    np.savetxt(path, data, fmt="%.17g", delimiter=",",
               header=",".join(names), comments="")


def load_csv(path):
    """Read a dump_csv file back: returns (grid, {name: array}).

    Grid geometry is inferred from the two coordinate columns; uniform
    spacing is validated.
    """
    with open(path, "r") as fh:
        header = fh.readline().strip()
    names = header.split(",")
    if len(names) < 2:
        raise ValueError("CSV needs at least the two coordinate columns")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != len(names):
        raise ValueError("CSV column count does not match header")
    c0, c1 = data[:, 0], data[:, 1]
    xs = np.unique(c0)
    ys = np.unique(c1)
    nx, ny = len(xs), len(ys)
    if nx * ny != data.shape[0]:
        raise ValueError("CSV rows do not form a full rectangular grid")
    for vals, nm in ((xs, names[0]), (ys, names[1])):
        if len(vals) > 1:
            steps = np.diff(vals)
            if not np.allclose(steps, steps[0], rtol=1e-10, atol=1e-14):
                raise ValueError(f"non-uniform spacing in column {nm!r}")
    # verify the promised ordering: axis-0 fastest
    if not np.array_equal(c0.reshape(ny, nx), np.tile(xs, (ny, 1))):
        raise ValueError("CSV rows are not in axis-0-fastest order")
    if not np.array_equal(c1.reshape(ny, nx), np.repeat(ys, nx).reshape(ny, nx)):
        raise ValueError("CSV rows are not in axis-0-fastest order")
    hx = xs[1] - xs[0] if nx > 1 else 1.0
    hy = ys[1] - ys[0] if ny > 1 else 1.0
    grid = Grid2(nx, ny, float(xs[0]), float(ys[0]), float(hx), float(hy),
                 (names[0], names[1]))
    fields = {}
    for k, name in enumerate(names[2:], start=2):
        fields[name] = data[:, k].reshape(ny, nx).T.copy()
    return grid, fields


def merge_complex_columns(fields):
    """Collapse name_re/name_im pairs from load_csv into complex arrays."""
    out = {}
    done = set()
    for name in fields:
        if name.endswith("_re") and name[:-3] + "_im" in fields:
            stem = name[:-3]
            out[stem] = fields[name] + 1j * fields[stem + "_im"]
            done.add(name)
            done.add(stem + "_im")
    for name in fields:
        if name not in done:
            out[name] = fields[name]
    return out


def split_complex_columns(columns):
    """Expand complex arrays into name_re/name_im pairs for dump_csv."""
    out = {}
    for name, arr in columns.items():
        arr = np.asarray(arr)
        if np.iscomplexobj(arr):
            out[name + "_re"] = arr.real
            out[name + "_im"] = arr.imag
        else:
            out[name] = arr
    return out


# ---------------------------------------------------------------------------
# Bicubic resampling (rotation families, conformal pullbacks)

def interp_bicubic(grid, f, Xq, Yq):
    """Sample f at query points by bicubic spline; returns (values, outside).

    `outside` marks query points beyond the grid hull; their values are
    taken from edge-clamped extrapolation and should be masked by callers.
    """
    from scipy.ndimage import map_coordinates
    f = np.asarray(f)
    ci = (np.asarray(Xq) - grid.x0) / grid.hx
    cj = (np.asarray(Yq) - grid.y0) / grid.hy
    outside = (ci < 0) | (ci > grid.nx - 1) | (cj < 0) | (cj > grid.ny - 1)
    coords = np.stack([ci, cj])
    if np.iscomplexobj(f):
        vals = (map_coordinates(f.real, coords, order=3, mode="nearest")
                + 1j * map_coordinates(f.imag, coords, order=3, mode="nearest"))
    else:
        vals = map_coordinates(f, coords, order=3, mode="nearest")
    return vals, outside
