"""Shared pytest fixtures for toruscover tests."""

from __future__ import annotations

import random
from collections.abc import Sequence

import pytest

from toruscover.lattice_core import IntMatrix, Lattice, lattice_from_rows
from toruscover.torus_cover import TorusCovering

SEED = 20240531


def mat(rows: Sequence[Sequence[int]], cols: int | None = None) -> IntMatrix:
    return IntMatrix.from_rows(rows, cols)


def lattice(rows: Sequence[Sequence[int]], n: int) -> Lattice:
    return lattice_from_rows(rows, n)


def covering(rows: Sequence[Sequence[int]], n: int) -> TorusCovering:
    return TorusCovering.from_kernel_rows(rows, n)


def random_matrix(
    rng: random.Random, rows: int, cols: int, lo: int, hi: int
) -> IntMatrix:
    return mat([[rng.randint(lo, hi) for _ in range(cols)] for _ in range(rows)], cols)


def random_unimodular(rng: random.Random, n: int, steps: int = 12) -> IntMatrix:
    """A product of random elementary row operations."""
    rows = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps if n > 1 else 0):
        i, j = rng.sample(range(n), 2)
        c = rng.choice([-2, -1, 1, 2])
        rows[i] = [a + c * b for a, b in zip(rows[i], rows[j], strict=True)]
    if n and rng.random() < 0.5:
        rows[0] = [-a for a in rows[0]]
    return mat(rows, n)


def random_full_rank_lattice(rng: random.Random, n: int, max_entry: int = 3) -> Lattice:
    """A full-rank sublattice from an upper-triangular basis with positive diagonal."""
    rows = [
        [0] * i
        + [rng.randint(1, max_entry)]
        + [rng.randint(0, max_entry) for _ in range(n - i - 1)]
        for i in range(n)
    ]
    return lattice(rows, n)


@pytest.fixture
def rng() -> random.Random:
    """Seeded generator so property suites are reproducible."""
    return random.Random(SEED)


@pytest.fixture
def sqrt_x_cbrt_y() -> TorusCovering:
    """Kernel of √x + ∛y."""
    return covering([[2, 0], [0, 3]], 2)


@pytest.fixture
def sqrt_x_sqrt_y() -> TorusCovering:
    """Kernel of √x + √y."""
    return covering([[2, 0], [0, 2]], 2)
