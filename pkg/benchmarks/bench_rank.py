"""Timing comparison of the compiled and pure-Python rank kernels.

Run as: python3 benchmarks/bench_rank.py [--sizes 20,40,80] [--repeats 5]

Both kernels run the same fraction-free elimination over Python ints, so
the compiled variant's win is bounded by loop overhead; entries are kept
small enough that bignum arithmetic does not dominate either side.
"""

from __future__ import annotations

import argparse
import random
import statistics
import time
from typing import Callable, List

from srk import _kernels, _rankcore_py


def make_matrix(rng: random.Random, size: int, deficient: bool) -> List[List[int]]:
    if not deficient:
        return [[rng.randint(-9, 9) for _ in range(size)] for _ in range(size)]
    basis = [[rng.randint(-9, 9) for _ in range(size)] for _ in range(max(size // 3, 1))]
    rows = []
    for _ in range(size):
        mix = [0] * size
        for b in basis:
            c = rng.randint(-2, 2)
            mix = [x + c * y for x, y in zip(mix, b)]
        rows.append(mix)
    return rows


def time_kernel(
    kernel: Callable[[List[List[int]]], int],
    matrices: List[List[List[int]]],
    repeats: int,
) -> float:
    samples = []
    for _ in range(repeats):
        started = time.perf_counter()
        for m in matrices:
            kernel([row[:] for row in m])
        samples.append(time.perf_counter() - started)
    return min(samples)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="16,32,64,96")
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--matrices", type=int, default=8)
    args = parser.parse_args()

    sizes = [int(s) for s in args.sizes.split(",")]
    rng = random.Random(0)
    print(f"compiled kernel available: {_kernels.HAVE_COMPILED}")
    print(f"{'size':>6} {'kind':>10} {'pure (ms)':>12} {'compiled (ms)':>14} {'speedup':>9}")
    for size in sizes:
        for deficient in (False, True):
            kind = "deficient" if deficient else "generic"
            matrices = [make_matrix(rng, size, deficient) for _ in range(args.matrices)]
            checks = {tuple(_rankcore_py.rank_int([r[:] for r in m]) for m in matrices)}
            checks.add(tuple(_kernels.rank_int([r[:] for r in m]) for m in matrices))
            if len(checks) != 1:
                raise SystemExit("kernel disagreement; do not trust these timings")
            pure = time_kernel(_rankcore_py.rank_int, matrices, args.repeats)
            fast = time_kernel(_kernels.rank_int, matrices, args.repeats)
            ratio = pure / fast if fast > 0 else float("inf")
            print(
                f"{size:>6} {kind:>10} {1000 * pure:>12.2f} {1000 * fast:>14.2f} {ratio:>8.2f}x"
            )
    if not _kernels.HAVE_COMPILED:
        print("note: compiled column is the pure kernel again (extension not built)")


if __name__ == "__main__":
    main()
