"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Each kernel runs on the same inputs under both backends; results are
checked for agreement before timings are printed.
"""
import argparse
import timeit

import numpy as np

from conclab import kernels
from conclab.spaces import trial_rng


def cases():
    rng = trial_rng(2024, 0)
    n = 12
    E = rng.random((2, n, n)) * 3
    m = np.full(n, 1 / n)
    sweep = (E, m, m, np.array([0, 1]), np.array([1.0, 2.0]), np.array([1.0, 1.0]))
    perm = rng.permutation(1000).astype(float)
    a, b = rng.integers(0, 2, 500), rng.integers(0, 2, 500)
    sizes = rng.random(200)
    wh, wv = rng.exponential(size=(20, 41)), rng.exponential(size=(21, 40))
    return {
        "subset_sweep n=12": lambda impl: kernels.subset_sweep(*sweep, impl=impl)[1].tolist(),
        "lis N=1000": lambda impl: kernels.lis_length(perm, impl),
        "lcs 500x500": lambda impl: kernels.lcs_length(a, b, impl),
        "ffd N=200": lambda impl: kernels.ffd_bins(sizes, impl),
        "passage 21x41": lambda impl: round(kernels.grid_passage_time(wh, wv, (0, 20), (0, 40), impl), 9),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    py = kernels.backend("python")
    try:
        cy = kernels.backend("compiled")
    except ImportError:
        raise SystemExit("compiled extension not built; run pip install -e . --no-build-isolation")
    print(f"{'kernel':<20}{'python (ms)':>14}{'compiled (ms)':>16}{'speedup':>10}")
    for name, fn in cases().items():
        if fn(py) != fn(cy):
            raise SystemExit(f"{name}: backends disagree")
        t_py = min(timeit.repeat(lambda: fn(py), number=1, repeat=args.repeat)) * 1e3
        t_cy = min(timeit.repeat(lambda: fn(cy), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<20}{t_py:>14.3f}{t_cy:>16.3f}{t_py / t_cy:>9.1f}x")


if __name__ == "__main__":
    main()
