"""Compare the compiled and pure-numpy kernel paths.

    python benchmarks/bench_kernels.py [--repeat 5]

Both paths are importable in one process (``*_numba`` and ``*_numpy``), so
the environment flag is not needed here. Each timing is the best of
``--repeat`` runs, after one warm-up call that absorbs JIT compilation.
"""
import argparse
import time
from itertools import combinations
from math import comb

import numpy as np

from resilient_submod import kernels
from resilient_submod._accel import HAVE_NUMBA
from resilient_submod.functions import random_psd_instance


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def logdet_case(m, d, k):
    f = random_psd_instance(m, d, seed=0)
    idx = np.array(list(combinations(range(m), k)), dtype=np.int64)
    return f.matrices, idx


def maxmin_case(m, alpha, beta):
    keep = alpha - beta
    rng = np.random.default_rng(0)
    binom = kernels.binomial_table(m, max(keep, 1) + 1)
    table = rng.random(comb(m, keep))
    patterns = kernels.position_patterns(alpha, keep)
    return m, alpha, table, binom, patterns


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not HAVE_NUMBA:
        print("numba is not installed; only the numpy path can run")
    print(f"{'kernel':<10} {'case':<22} {'numba_s':>10} {'numpy_s':>10} {'speedup':>8}")
    for m, d, k in [(12, 5, 5), (15, 20, 6), (15, 20, 3)]:
        mats, idx = logdet_case(m, d, k)
        np_t = best_of(lambda: kernels.logdet_sums_numpy(mats, idx), args.repeat)
        nb_t = best_of(lambda: kernels.logdet_sums_numba(mats, idx), args.repeat) if HAVE_NUMBA else float("nan")
        a, b = kernels.logdet_sums_numpy(mats, idx), kernels.logdet_sums_numba(mats, idx)
        assert np.allclose(a, b, rtol=1e-10, atol=1e-10)
        print(f"{'logdet':<10} {f'm={m} d={d} k={k} n={len(idx)}':<22} {nb_t:>10.4f} {np_t:>10.4f} {np_t / nb_t:>8.1f}")
    for m, alpha, beta in [(12, 7, 1), (15, 7, 1), (15, 7, 6)]:
        case = maxmin_case(m, alpha, beta)
        np_t = best_of(lambda: kernels.maxmin_table_numpy(*case), args.repeat)
        nb_t = best_of(lambda: kernels.maxmin_table_numba(*case), args.repeat) if HAVE_NUMBA else float("nan")
        a, b = kernels.maxmin_table_numpy(*case), kernels.maxmin_table_numba(*case)
        assert list(a[0]) == list(b[0]) and a[1] == b[1]
        print(f"{'maxmin':<10} {f'm={m} a={alpha} b={beta}':<22} {nb_t:>10.4f} {np_t:>10.4f} {np_t / nb_t:>8.1f}")


if __name__ == "__main__":
    main()
