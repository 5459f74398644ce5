#!/usr/bin/env python3
"""Time matrix-free matvecs on isotropic chains and report the growth rate.

Equivalent to `kronspin bench --n-list ... --json` but as a plain script for
notebook-style exploration; prints a table plus the fitted exponent of
best-time vs register size.  Thread count follows KRONSPIN_THREADS.
"""

import argparse
import time

import numpy as np

from kronspin import (
    CouplingEdge,
    HamiltonianSpec,
    matvec,
    spec_to_kronsum,
    worker_count,
)


def chain(n: int) -> HamiltonianSpec:
    return HamiltonianSpec(n, 1.0, tuple(CouplingEdge(i, i + 1, 1.0) for i in range(1, n)))


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="14,16,18,20",
                        help="comma-separated site counts (default 14,16,18,20)")
    parser.add_argument("--repeats", type=int, default=5, help="timed runs per size")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    sizes = [int(tok) for tok in args.sizes.split(",") if tok.strip()]
    rng = np.random.default_rng(args.seed)
    print(f"workers: {worker_count()}")
    print(f"{'n':>4} {'dim':>10} {'terms':>6} {'best s':>10} {'amplitudes/s':>14}")

    best_times = []
    for n in sizes:
        op = spec_to_kronsum(chain(n))
        dim = op.dimension
        x = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        matvec(op, x)  # warm-up
        times = []
        for _ in range(args.repeats):
            t0 = time.perf_counter()
            matvec(op, x)
            times.append(time.perf_counter() - t0)
        best = min(times)
        best_times.append(best)
        passes = sum(len(t.active_slots) + 1 for t in op.terms)
        print(f"{n:>4} {dim:>10} {len(op.terms):>6} {best:>10.6f} {dim * passes / best:>14.3e}")

    if len(sizes) >= 2:
        slope = np.polyfit(sizes, np.log2(best_times), 1)[0]
        print(f"fitted exponent: best time ~ 2^({slope:.3f} n)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
