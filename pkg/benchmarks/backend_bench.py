"""Timing comparison of the compiled and pure-Python kernel backends.

Runs the two hot paths at realistic sizes: exact cosine-measure subset
enumeration on rotated sign-symmetric bases, and the sphere tau scan whose
cost is 2^(k-1) per support coordinate.  Prints one table per path.

Usage: python3 benchmarks/backend_bench.py [--repeats N]
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from rdsearch import _backend, _kernels_py
from rdsearch.pss import ADMIT_TOL, COND_MAX, build_pss
from rdsearch.sphere import _FEAS_TOL

try:
    from rdsearch import _native
except ImportError:
    _native = None


def _time(fn, repeats):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def _gram(m: int) -> np.ndarray:
    d = build_pss("plus_minus", m, rotation_seed=m).directions
    g = d @ d.T
    return (g + g.T) / 2.0


def bench_subsets(repeats: int):
    print("exact cosine-measure enumeration, size-m subsets of the 2m "
          "rotated signed basis directions")
    print(f"{'m':>4} {'subsets':>12} {'python (s)':>12} {'native (s)':>12} "
          f"{'speedup':>9}")
    for m in (6, 8, 10):
        gram = _gram(m)
        n_subsets = math.comb(2 * m, m)
        t_py, r_py = _time(
            lambda: _kernels_py.best_subset_candidate(gram, m, COND_MAX, ADMIT_TOL),
            repeats)
        if _native is None:
            print(f"{m:>4} {n_subsets:>12} {t_py:>12.4f} {'n/a':>12} {'n/a':>9}")
            continue
        t_nat, r_nat = _time(
            lambda: _native.best_subset_candidate(gram, m, COND_MAX, ADMIT_TOL),
            repeats)
        assert abs(r_py[0] - r_nat[0]) < 1e-10, "backends disagree"
        print(f"{m:>4} {n_subsets:>12} {t_py:>12.4f} {t_nat:>12.4f} "
              f"{t_py / t_nat:>8.1f}x")


def bench_sphere(repeats: int):
    print()
    print("sphere tau scan, 2^(k-1) sign patterns per support coordinate")
    print(f"{'k':>4} {'patterns':>12} {'python (s)':>12} {'native (s)':>12} "
          f"{'speedup':>9}")
    rng = np.random.default_rng(0)
    for k in (14, 18, 20):
        x = rng.uniform(0.2, 1.0, k)
        x = np.sort(x / np.linalg.norm(x))[::-1].copy()
        t_py, r_py = _time(lambda: _kernels_py.sphere_tau_term(x, _FEAS_TOL),
                           repeats)
        if _native is None:
            print(f"{k:>4} {k * 2**(k-1):>12} {t_py:>12.4f} {'n/a':>12} {'n/a':>9}")
            continue
        t_nat, r_nat = _time(lambda: _native.sphere_tau_term(x, _FEAS_TOL),
                             repeats)
        assert abs(r_py[0] - r_nat[0]) < 1e-12, "backends disagree"
        assert r_py[1] == r_nat[1], "feasible counts disagree"
        print(f"{k:>4} {k * 2**(k-1):>12} {t_py:>12.4f} {t_nat:>12.4f} "
              f"{t_py / t_nat:>8.1f}x")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=3,
                        help="timing repeats; the best run is reported")
    args = parser.parse_args()
    print(f"active backend: {_backend.BACKEND}")
    if _native is None:
        print("compiled extension unavailable; timing the pure-Python "
              "kernels only")
    print()
    bench_subsets(args.repeats)
    bench_sphere(args.repeats)


if __name__ == "__main__":
    main()
