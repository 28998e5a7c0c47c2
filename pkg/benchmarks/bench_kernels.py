"""Benchmark of the hot kernels: compiled extension vs numpy reference.

Run:  python benchmarks/bench_kernels.py [--sizes 256,512,1024,2048]

The weight-matrix build is the dominant O(n^2) cost of a solve (it is
cached per problem, but every new mesh/order pair pays it); the
Mittag-Leffler vector evaluation prices the norm weights.
"""

import argparse
import time

import numpy as np

from fracfde.backend import available_backends
from fracfde.mesh import GradedMesh


def _time(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        tic = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - tic)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="256,512,1024,2048")
    parser.add_argument("--mu", type=float, default=0.5)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    backends = available_backends()
    names = sorted(backends)
    if len(names) == 1:
        print(f"only the {names[0]} backend is available")

    print(f"weight matrix build, mu = {args.mu}")
    header = "   n  " + "".join(f"{n:>12}" for n in names) + "     speedup"
    print(header)
    for n in sizes:
        u = GradedMesh(0.0, 1.0, n, 3.0).nodes.copy()
        times = {}
        for name in names:
            mod = backends[name]
            times[name] = _time(lambda m=mod: m.pi_weight_matrix(u, args.mu))
        row = f"{n:>5} " + "".join(f"{times[k] * 1e3:>10.2f}ms" for k in names)
        if len(names) == 2:
            row += f"{times['python'] / times['c']:>11.2f}x"
        print(row)

    print(f"\nMittag-Leffler vector evaluation, mu = {args.mu}")
    print(header)
    for n in sizes:
        u = GradedMesh(0.0, 1.0, n, 3.0).nodes.copy()
        z = 2.0 * (u - u[0]) ** args.mu
        times = {}
        for name in names:
            mod = backends[name]
            times[name] = _time(lambda m=mod: m.ml_series_vec(args.mu, 1.0, z))
        row = f"{n:>5} " + "".join(f"{times[k] * 1e3:>10.2f}ms" for k in names)
        if len(names) == 2:
            row += f"{times['python'] / times['c']:>11.2f}x"
        print(row)

    # agreement spot-check so the table cannot silently compare different math
    if len(names) == 2:
        u = GradedMesh(0.0, 1.0, 512, 3.0).nodes.copy()
        a = backends["c"].pi_weight_matrix(u, args.mu)
        b = backends["python"].pi_weight_matrix(u, args.mu)
        gap = float(np.max(np.abs(a - b)))
        print(f"\nmax |c - python| on a 512-node weight matrix: {gap:.3e}")


if __name__ == "__main__":
    main()
