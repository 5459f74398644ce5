#!/usr/bin/env python3
"""Cross-check the dense and matrix-free eigensolvers on one Hamiltonian.

Builds an isotropic chain spec on the fly, diagonalizes it densely, then asks
Lanczos for the extremal eigenvalues from each end and prints both against
the dense values.  A disagreement above tolerance exits nonzero.
"""

import argparse

import numpy as np

from kronspin import (
    CouplingEdge,
    HamiltonianSpec,
    build_general,
    eigh,
    lanczos_extremal,
    spec_to_kronsum,
)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sites", type=int, default=8)
    parser.add_argument("--mu-b0", type=float, default=1.0)
    parser.add_argument("--coupling", type=float, default=1.0)
    parser.add_argument("--k", type=int, default=3, help="eigenvalues per end")
    parser.add_argument("--tol", type=float, default=1e-7, help="agreement threshold")
    args = parser.parse_args()

    spec = HamiltonianSpec(
        args.sites,
        args.mu_b0,
        tuple(CouplingEdge(i, i + 1, args.coupling) for i in range(1, args.sites)),
    )
    print(f"chain: n={spec.n_sites}, mu_b0={spec.mu_b0:g}, J={args.coupling:g}, "
          f"dimension {1 << spec.n_sites}")

    dense = eigh(build_general(spec), want_vectors=False).eigenvalues
    op = spec_to_kronsum(spec)
    low = lanczos_extremal(op, which="lowest", k=args.k).eigenvalues
    high = lanczos_extremal(op, which="highest", k=args.k).eigenvalues

    worst = 0.0
    print(f"{'end':<8} {'dense':>22} {'lanczos':>22} {'abs diff':>12}")
    for i in range(args.k):
        diff = abs(low[i] - dense[i])
        worst = max(worst, diff)
        print(f"low[{i}]   {dense[i]:>22.15f} {low[i]:>22.15f} {diff:>12.3e}")
    for i in range(args.k):
        diff = abs(high[i] - dense[-args.k + i])
        worst = max(worst, diff)
        print(f"high[{i}]  {dense[-args.k + i]:>22.15f} {high[i]:>22.15f} {diff:>12.3e}")

    if worst > args.tol:
        print(f"DISAGREEMENT: worst |dense - lanczos| = {worst:.3e} > {args.tol:g}")
        return 1
    print(f"agreement: worst |dense - lanczos| = {worst:.3e} <= {args.tol:g}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
