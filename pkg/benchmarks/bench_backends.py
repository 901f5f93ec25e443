#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Runs each hot kernel on a representative workload through both backends and
prints wall-clock times plus the speedup.  Usage:

    python benchmarks/bench_backends.py [--repeat N]
"""

import argparse
import time

import seatlot._kernels_py as kpy
from seatlot.rng import SeededSource

try:
    import seatlot._kernels_c as kc
except ImportError:
    kc = None


def _fracs(src, s, den):
    nums = [src.randbelow(den) for _ in range(s - 1)]
    nums.append((-sum(nums)) % den)
    return nums


def workloads():
    src = SeededSource(101)
    den = 999_983
    s = 12
    nums = _fracs(src, s, den)
    floors = [src.randbelow(40) for _ in range(s)]
    ceils = [f + 1 for f in floors]
    house = sum(floors) + sum(nums) // den

    yield ("systematic_round x 20000", lambda k: [
        k.systematic_round_ints(nums, den, (17 * i) % den)
        for i in range(20_000)])

    den8 = 9973
    nums8 = _fracs(SeededSource(5), 8, den8)
    yield ("exact law, 8 states (5040 orderings)",
           lambda k: k.averaged_mask_lengths(nums8, den8, True))

    yield ("simulate_batch n=100000, 12 states",
           lambda k: k.simulate_batch(floors, nums, den, floors, ceils,
                                      [0] * s, 7, 100_000, house))

    weights = [9, 9, 2]
    yield ("conditional_batch n=100000",
           lambda k: k.conditional_batch(weights, 2, 11, 100_000, 10 ** 6))

    rnums = [4, 1]
    yield ("resample_batch n=100000",
           lambda k: k.resample_batch([2, 2], rnums, 5, [3, 2], [4, 3],
                                      13, 100_000, 10 ** 4))


def timed(fn, repeat):
    best = []
    result = None
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        best.append(time.perf_counter() - start)
    return min(best), result


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    print(f"{'workload':<42} {'pure':>10} {'compiled':>10} {'speedup':>8}")
    print("-" * 74)
    for name, runner in workloads():
        t_py, out_py = timed(lambda: runner(kpy), args.repeat)
        if kc is None:
            print(f"{name:<42} {t_py:>9.3f}s {'n/a':>10} {'n/a':>8}")
            continue
        t_c, out_c = timed(lambda: runner(kc), args.repeat)
        match = "" if out_py == out_c else "  !! MISMATCH"
        print(f"{name:<42} {t_py:>9.3f}s {t_c:>9.3f}s "
              f"{t_py / t_c:>7.1f}x{match}")
    if kc is None:
        print("\ncompiled kernels unavailable; install with Cython to compare")


if __name__ == "__main__":
    main()
