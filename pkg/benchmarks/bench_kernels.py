"""Compare the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from clab import _kernels_py

try:
    from clab import _kernels
except ImportError:
    _kernels = None


def cases():
    rng = np.random.default_rng(0)
    n = 200_000
    a, b = rng.integers(0, n, n), rng.integers(0, n, n)
    m = 1 << 17
    perms = ((np.arange(m) + 1) % m)[None, :]
    tables = rng.integers(0, 4, (1, m, 2))
    tables[0, -1] = (-tables[0, :-1].sum(axis=0)) % 4
    mask = np.ones(m, dtype=np.uint8)
    alpha = np.sqrt(2) - 1
    return {
        "components(n=2e5)": lambda k: k.components(n, a, b),
        "propagate(m=2^17)": lambda k: k.propagate(perms, tables, np.array([4, 4]), mask),
        "skew_orbit(N=1e6)": lambda k: k.skew_orbit(2 * alpha % 1, alpha, 1_000_000),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _kernels is None:
        print("compiled extension not built; only the Python timings are shown")
    print(f"{'kernel':24s} {'python s':>10s} {'cython s':>10s} {'speedup':>8s}")
    for name, fn in cases().items():
        tp = min(timeit.repeat(lambda: fn(_kernels_py), number=1, repeat=args.repeat))
        if _kernels is None:
            print(f"{name:24s} {tp:10.4f} {'-':>10s} {'-':>8s}")
            continue
        tc = min(timeit.repeat(lambda: fn(_kernels), number=1, repeat=args.repeat))
        print(f"{name:24s} {tp:10.4f} {tc:10.4f} {tp / tc:7.1f}x")


if __name__ == "__main__":
    main()
