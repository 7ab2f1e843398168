"""Time the path-ordered sweep under the numba and numpy backends.

Runs the same su(2) connection through kernels.path_sweep with each
available backend and reports best-of-N wall times plus the agreement
between the two results.  The numba timing excludes JIT compilation
(warmup() runs outside the clock).

    python3 benchmarks/bench_kernels.py --sizes 65 129 257 --reps 5
"""

import argparse
import time

import numpy as np

import gaugeflow.grid_fields as gf
import gaugeflow.kernels as kn


def su2_connection(n, scale=0.4):
    g = gf.square_grid(n, -1.0, 1.0)
    X, Y = g.mesh()

    def mat(a, b, c):
        J = np.empty(g.shape + (2, 2), dtype=complex)
        J[..., 0, 0] = 0.5j * c
        J[..., 0, 1] = 0.5 * (a + 1j * b)
        J[..., 1, 0] = -0.5 * (a - 1j * b)
        J[..., 1, 1] = -0.5j * c
        return J

    J0 = mat(scale * np.sin(X) * np.cos(Y), scale * np.cos(2.0 * X) + 0.0 * Y,
             scale * np.sin(X + Y))
    J1 = mat(scale * np.cos(X - Y), scale * np.sin(2.0 * Y) + 0.0 * X,
             scale * X * Y / 4.0)
    return g, J0, J1


def bench_one(n, reps):
    g, J0, J1 = su2_connection(n)
    base = g.base_index
    times = {}
    results = {}
    for name in kn.available_backends():
        kn.set_backend(name)
        kn.warmup()
        kn.path_sweep(J0, J1, g.hx, g.hy, base)
        best = np.inf
        for _ in range(reps):
            t0 = time.perf_counter()
            G, _ = kn.path_sweep(J0, J1, g.hx, g.hy, base)
            best = min(best, time.perf_counter() - t0)
        times[name] = best
        results[name] = G
    return times, results


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[65, 129, 257])
    ap.add_argument("--reps", type=int, default=5)
    args = ap.parse_args(argv)

    backends = kn.available_backends()
    print(f"backends: {', '.join(backends)}")
    header = f"{'n':>6}" + "".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}{'max diff':>12}"
    print(header)
    keep = kn.get_backend()
    try:
        for n in args.sizes:
            times, results = bench_one(n, args.reps)
            row = f"{n:>6}" + "".join(f"{times[b]*1e3:>10.2f}ms" for b in backends)
            if len(backends) == 2:
                row += f"{times['numpy'] / times['numba']:>9.1f}x"
                diff = np.abs(results["numba"] - results["numpy"]).max()
                row += f"{diff:>12.2e}"
            print(row)
    finally:
        kn.set_backend(keep)


if __name__ == "__main__":
    main()
