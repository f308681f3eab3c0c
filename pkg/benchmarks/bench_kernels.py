"""Time the numba kernels against their numpy twins.

Usage: python3 benchmarks/bench_kernels.py [--m 8] [--support 8] [--subsets 14] [--repeat 5]

Both backends are imported side by side from ``proprank.kernels`` (the
numba versions exist only when numba is importable and not disabled), so a
single run reports both. Outputs are compared for equality before timing.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from proprank import kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m", type=int, default=8)
    ap.add_argument("--support", type=int, default=8)
    ap.add_argument("--subsets", type=int, default=14, help="support size for subset coverage")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    perms = kernels.all_permutations(args.m)
    support = np.array([rng.permutation(args.m) for _ in range(args.support)])
    pos = kernels.positions_matrix(support)
    npairs = args.m * (args.m - 1) // 2
    agree = rng.random((args.subsets, npairs)) < 0.5

    cases = [
        ("permutation_utilities", (perms, pos),
         kernels.permutation_utilities_numpy, kernels.permutation_utilities_numba),
        ("subset_coverage", (agree,),
         kernels.subset_coverage_numpy, kernels.subset_coverage_numba),
    ]
    print(f"backend in use: {kernels.BACKEND}")
    print(f"{'kernel':24s} {'numpy s':>10s} {'numba s':>10s} {'speedup':>8s}")
    for name, inputs, np_fn, nb_fn in cases:
        t_np = best_of(lambda: np_fn(*inputs), args.repeat)
        if nb_fn is None:
            print(f"{name:24s} {t_np:10.4f} {'n/a':>10s} {'n/a':>8s}")
            continue
        if not np.array_equal(np_fn(*inputs), nb_fn(*inputs)):
            raise SystemExit(f"{name}: backends disagree")
        t_nb = best_of(lambda: nb_fn(*inputs), args.repeat)
        print(f"{name:24s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.1f}x")


if __name__ == "__main__":
    main()
