"""Cup-product characteristic classes of torus coverings.

``H*(Tⁿ, Z_m)`` is the exterior algebra on the degree-one classes
``e_1, ..., e_n``. A degree-``k`` class is stored densely by its
coefficients on ``e_S`` for the ``k``-subsets ``S``, in lexicographic order.
Subsets are 0-based internally and 1-based wherever they are rendered.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Sequence
from dataclasses import dataclass
from functools import lru_cache
from math import comb

from toruscover.exceptions import (
    DimensionMismatchError,
    InputError,
    ShapeError,
    TrivialCoveringError,
)
from toruscover.lattice_core import IntMatrix
from toruscover.torus_cover import TorusCovering, smith_coordinates

logger = logging.getLogger(__name__)

# Coefficient modulus used when the monodromy is free abelian.
FREE_MODULUS = 2


@lru_cache(maxsize=64)
def subsets(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    return tuple(itertools.combinations(range(n), k))


@lru_cache(maxsize=64)
def _subset_index(n: int, k: int) -> dict[tuple[int, ...], int]:
    return {S: i for i, S in enumerate(subsets(n, k))}


@dataclass(frozen=True)
class CohomologyClass:
    n: int
    k: int
    m: int
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.m < 2:
            raise InputError(f"coefficient modulus must be >= 2, got {self.m}")
        if len(self.coeffs) != comb(self.n, self.k):
            raise ShapeError(
                f"degree-{self.k} class on T^{self.n} needs {comb(self.n, self.k)} "
                f"coefficients, got {len(self.coeffs)}"
            )
        if any(not 0 <= c < self.m for c in self.coeffs):
            raise InputError(f"coefficients must be residues mod {self.m}")

    @classmethod
    def from_mapping(
        cls, n: int, k: int, m: int, values: dict[tuple[int, ...], int]
    ) -> CohomologyClass:
        """Build from a sparse 0-based ``subset -> value`` mapping."""
        index = _subset_index(n, k)
        coeffs = [0] * len(index)
        for S, value in values.items():
            key = tuple(sorted(S))
            if key not in index:
                raise ShapeError(f"{list(S)} is not a {k}-subset of range({n})")
            coeffs[index[key]] = value % m
        return cls(n, k, m, tuple(coeffs))

    def coefficient(self, S: Sequence[int]) -> int:
        return self.coeffs[_subset_index(self.n, self.k)[tuple(sorted(S))]]

    def as_pairs(self) -> list[tuple[list[int], int]]:
        """``(1-based subset, coefficient)`` pairs in lexicographic order."""
        return [
            ([i + 1 for i in S], c)
            for S, c in zip(subsets(self.n, self.k), self.coeffs, strict=True)
        ]


def _determinant(vectors: Sequence[Sequence[int]], columns: Sequence[int]) -> int:
    return IntMatrix.from_rows(
        ([v[j] for j in columns] for v in vectors), len(columns)
    ).determinant()


def wedge(
    vectors: Sequence[Sequence[int]], m: int, n: int | None = None
) -> CohomologyClass:
    """``v_1 ∧ ... ∧ v_k``, whose ``e_S`` coefficient is the minor on columns ``S``.

    Determinants are taken over Z, then reduced mod ``m``. ``n`` is only needed
    when there are no vectors.
    """
    if n is None:
        if not vectors:
            raise InputError("ambient dimension required for an empty wedge")
        n = len(vectors[0])
    for v in vectors:
        if len(v) != n:
            raise DimensionMismatchError(n, len(v), "vector length")
    k = len(vectors)
    if k > n:
        raise ShapeError(f"cannot wedge {k} vectors in dimension {n}")
    coeffs = tuple(_determinant(vectors, S) % m for S in subsets(n, k))
    return CohomologyClass(n, k, m, coeffs)


def degree_one_class(v: Sequence[int], m: int) -> CohomologyClass:
    return wedge([v], m)


def _merge_sign(S: Sequence[int], T: Sequence[int]) -> int:
    inversions = sum(1 for s in S for t in T if s > t)
    return -1 if inversions % 2 else 1


def cup(w1: CohomologyClass, w2: CohomologyClass) -> CohomologyClass:
    """Exterior product ``w1 ∪ w2``."""
    if w1.n != w2.n:
        raise DimensionMismatchError(w1.n, w2.n, "torus dimension")
    if w1.m != w2.m:
        raise InputError(f"coefficient moduli differ: {w1.m} and {w2.m}")
    n, m, k = w1.n, w1.m, w1.k + w2.k
    values: dict[tuple[int, ...], int] = {}
    for S, a in zip(subsets(n, w1.k), w1.coeffs, strict=True):
        if not a:
            continue
        for T, b in zip(subsets(n, w2.k), w2.coeffs, strict=True):
            if b and not set(S) & set(T):
                key = tuple(sorted(S + T))
                values[key] = values.get(key, 0) + _merge_sign(S, T) * a * b
    return CohomologyClass.from_mapping(n, k, m, values)


def is_zero(w: CohomologyClass) -> bool:
    return not any(w.coeffs)


def nonzero_support(w: CohomologyClass) -> list[list[int]]:
    """1-based subsets carrying a nonzero coefficient."""
    return [S for S, c in w.as_pairs() if c]


def obstruction_class(c: TorusCovering) -> tuple[int, CohomologyClass]:
    """The degree-``k`` class certifying that ``c`` needs ``k`` parameters.

    ``k`` is the rank of the monodromy group. The projections onto the ``k``
    cyclic summands of the Smith decomposition are reduced mod ``m_1`` (mod 2
    for free monodromy) and multiplied together. They extend to a basis of
    Zⁿ, so their minors are coprime and the class never vanishes.
    """
    coords = smith_coordinates(c)
    if coords.k == 0:
        raise TrivialCoveringError("the trivial covering has no obstruction class")
    m = coords.torsion[0] if coords.torsion else FREE_MODULUS
    projection = coords.projection()
    vectors = [
        [x % m for x in projection.column(j)] for j in range(projection.cols)
    ]
    w = wedge(vectors, m, c.n)
    logger.debug(
        "obstruction class of degree %d mod %d: support %s",
        w.k,
        m,
        nonzero_support(w),
    )
    return m, w


def pullback_class(w: CohomologyClass, F: IntMatrix) -> CohomologyClass:
    """Pull ``w`` back along the torus map ``F: Tᵃ -> Tⁿ`` (``a x n``).

    ``e_j`` pulls back to column ``j`` of ``F``; on ``k``-subsets this is the
    Cauchy–Binet expansion through the minors of ``F``.
    """
    if F.cols != w.n:
        raise ShapeError(f"torus map into T^{F.cols} applied to a class on T^{w.n}")
    a = F.rows
    rows = F.to_rows()
    coeffs = []
    for T in subsets(a, w.k):
        picked = [rows[i] for i in T]
        total = sum(
            c * _determinant(picked, S)
            for S, c in zip(subsets(w.n, w.k), w.coeffs, strict=True)
            if c
        )
        coeffs.append(total % w.m)
    return CohomologyClass(a, w.k, w.m, tuple(coeffs))
