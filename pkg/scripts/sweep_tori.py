#!/usr/bin/env python3
"""Exhaustive cross-check of torus covering invariants.

Walks every kernel lattice with an upper-triangular basis whose entries lie
in ``[0, top]`` and checks, for each covering:

* the minimal inducing dimension equals the rank of the monodromy group,
* it matches a brute-force count of generators for small finite groups,
* the obstruction class in top degree does not vanish.

Usage:
    # Default sweep over Z^3 with entries up to 4
    python scripts/sweep_tori.py

    # Larger entries in Z^2
    python scripts/sweep_tori.py --dim 2 --top 12
"""

from __future__ import annotations

import argparse
import itertools
import sys
from collections import Counter
from pathlib import Path

# Allow running from project root without install
sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from toruscover.abgroup import (
    BRUTEFORCE_ORDER_CAP,
    minimal_generators_bruteforce,
    rank,
)
from toruscover.charclass import is_zero, obstruction_class
from toruscover.torus_cover import (
    TorusCovering,
    min_inducing_dim,
    monodromy_group,
)


def upper_triangular_coverings(n: int, top: int):
    slots = [(i, j) for i in range(n) for j in range(i, n)]
    for values in itertools.product(range(top + 1), repeat=len(slots)):
        rows = [[0] * n for _ in range(n)]
        for (i, j), value in zip(slots, values, strict=True):
            rows[i][j] = value
        yield rows, TorusCovering.from_kernel_rows(rows, n)


def check(rows: list[list[int]], c: TorusCovering) -> list[str]:
    """Return a description of every invariant the covering violates."""
    problems = []
    k = min_inducing_dim(c)
    G = monodromy_group(c)
    if k != rank(G):
        problems.append(f"min_inducing_dim {k} != rank {rank(G)}")
    order = G.order()
    if order is not None and order <= BRUTEFORCE_ORDER_CAP:
        brute = minimal_generators_bruteforce(G)
        if brute != k:
            problems.append(f"brute-force generators {brute} != {k}")
    if k:
        _, w = obstruction_class(c)
        if is_zero(w):
            problems.append("obstruction class vanishes")
    return problems


def main() -> None:
    parser = argparse.ArgumentParser(
        description="Sweep torus coverings and cross-check invariants",
    )
    parser.add_argument(
        "--dim", type=int, default=3, help="Torus dimension",
    )
    parser.add_argument(
        "--top", type=int, default=4, help="Largest basis entry",
    )
    args = parser.parse_args()

    if args.dim < 1 or args.top < 0:
        parser.error("--dim must be positive and --top nonnegative")

    histogram: Counter[int] = Counter()
    failures = 0
    for rows, c in upper_triangular_coverings(args.dim, args.top):
        histogram[min_inducing_dim(c)] += 1
        for problem in check(rows, c):
            failures += 1
            print(f"FAIL {rows}: {problem}", file=sys.stderr)

    total = sum(histogram.values())
    print(f"Checked {total} coverings of T^{args.dim}")
    for k in sorted(histogram):
        print(f"  min_inducing_dim={k}: {histogram[k]}")
    if failures:
        print(f"{failures} invariant violations", file=sys.stderr)
        sys.exit(1)
    print("All invariants hold")


if __name__ == "__main__":
    main()
