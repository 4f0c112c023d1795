#!/usr/bin/env python3
"""Probe the empirical breakdown step of the coefficient solver.

The factorization is guaranteed only for sufficiently small steps; past the
basin the Gauss-Newton iteration stops converging and the library raises a
typed SolverError.  This script bisects the largest step that still solves for
the benchmark trap at a range of start times.
"""

import numpy as np

from rotsplit.decomp import SolverError, decompose_step
from rotsplit.magnus import QuadraticHamiltonian


def largest_step(qh, t, lo=1e-3, hi=16.0, iters=40):
    def ok(h):
        try:
            return decompose_step(qh, t, h, 4).residual <= 1e-12
        except (SolverError, ValueError):
            return False

    if not ok(lo):
        return 0.0
    while ok(hi):
        hi *= 2.0
        if hi > 1e4:
            return float("inf")
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if ok(mid) else (lo, mid)
    return lo


def main():
    qh = QuadraticHamiltonian(lambda t: 4.0 * (1.0 + np.sin(0.5 * t)),
                              lambda t: 4.0 - np.sin(0.5 * t), Omega=0.1)
    print("largest solvable step for the omega0^2 = 4 benchmark trap:")
    for t in (0.0, 0.5, 1.0, 1.5, 2.0, 2.5):
        print(f"  t = {t:4.1f}: h_max ~ {largest_step(qh, t):.3f}")


if __name__ == "__main__":
    main()
