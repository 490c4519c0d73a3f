"""Compare the numba and pure-numpy kernel paths.

    python3 benchmarks/bench_kernels.py [--worlds 20000] [--degree 4] [--repeat 20]
"""

import argparse
import time

import numpy as np

from mufusion.kernels import NUMBA_KERNELS, NUMPY_KERNELS, csr_from_edges


def best_of(fn, repeat):
    fn()  # warm-up (numba compiles here)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--worlds", type=int, default=20000)
    ap.add_argument("--degree", type=int, default=4)
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    n, m = args.worlds, args.worlds * args.degree
    src = rng.integers(0, n, m)
    dst = rng.integers(0, n, m)
    indptr, indices = csr_from_edges(n, src, dst)
    mask = rng.random(n) < 0.5
    owner = rng.integers(0, 2, n)
    alive = np.ones(n, dtype=np.bool_)
    target = rng.random(n) < 0.01

    print(f"{n} nodes, {len(indices)} edges")
    for name in ("diamond", "box", "attractor"):
        row = []
        for k in (NUMPY_KERNELS, NUMBA_KERNELS):
            f = getattr(k, name)
            if name == "attractor":
                call = lambda f=f: f(indptr, indices, owner, alive, target, 0)
            else:
                call = lambda f=f: f(indptr, indices, mask)
            row.append(best_of(call, args.repeat))
        print(f"{name:10s} numpy {row[0] * 1e3:8.3f} ms   numba {row[1] * 1e3:8.3f} ms   x{row[0] / row[1]:.1f}")


if __name__ == "__main__":
    main()
