"""Finitely generated abelian groups presented as quotients Zⁿ/L.

Groups are kept in invariant-factor form
``Z_{m_1} + ... + Z_{m_t} + Z^r`` with ``m_1 | m_2 | ... | m_t`` and every
``m_i >= 2``. The rank of such a group, the least number of cyclic summands
it splits into, is ``t + r``.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from math import prod

from sympy import factorint, isprime

from toruscover.exceptions import (
    ContainmentError,
    DimensionMismatchError,
    InputError,
    NotPrimeError,
    OracleLimitError,
)
from toruscover.lattice_core import (
    IntMatrix,
    Lattice,
    lattice_contains,
    lattice_from_matrix,
    relative_coordinates,
    smith_normal_form,
)

logger = logging.getLogger(__name__)

# Exhaustive generator search is exponential in the group order.
BRUTEFORCE_ORDER_CAP = 512


@dataclass(frozen=True)
class AbelianGroup:
    """Invariant-factor decomposition of a finitely generated abelian group."""

    torsion: tuple[int, ...] = ()
    free_rank: int = 0

    def __post_init__(self) -> None:
        if self.free_rank < 0:
            raise InputError(f"free rank must be nonnegative, got {self.free_rank}")
        for m in self.torsion:
            if m < 2:
                raise InputError(
                    f"torsion factors must be >= 2, got {list(self.torsion)}"
                )
        for a, b in itertools.pairwise(self.torsion):
            if b % a:
                raise InputError(
                    f"torsion factors must form a divisibility chain, got "
                    f"{list(self.torsion)}"
                )

    def is_finite(self) -> bool:
        return self.free_rank == 0

    def order(self) -> int | None:
        """Group order, ``None`` when there is a free part."""
        return prod(self.torsion) if self.is_finite() else None

    def elementary_divisors(self) -> list[int]:
        """Prime-power cyclic factors, sorted."""
        return sorted(
            p**e for m in self.torsion for p, e in factorint(m).items()
        )

    def render(self) -> str:
        """Human-readable form such as ``Z_2 + Z_4 + Z``."""
        parts = [f"Z_{m}" for m in self.torsion] + ["Z"] * self.free_rank
        return " + ".join(parts) if parts else "0"


def _structure_from_diagonal(diagonal: tuple[int, ...], n: int) -> AbelianGroup:
    nonzero = [d for d in diagonal if d]
    return AbelianGroup(
        torsion=tuple(d for d in nonzero if d >= 2),
        free_rank=n - len(nonzero),
    )


def quotient_structure(n: int, L: Lattice) -> AbelianGroup:
    """Invariant factors of Zⁿ/L, read off the Smith diagonal of L's basis."""
    if L.ambient_dim != n:
        raise DimensionMismatchError(n, L.ambient_dim, "ambient dimension")
    return _structure_from_diagonal(smith_normal_form(L.basis).diagonal, n)


def quotient_by_relations(relations: IntMatrix) -> AbelianGroup:
    """The group Zⁿ/⟨rows of ``relations``⟩ for an arbitrary relation matrix."""
    return _structure_from_diagonal(
        smith_normal_form(relations).diagonal, relations.cols
    )


def rank(G: AbelianGroup) -> int:
    return len(G.torsion) + G.free_rank


def rank_mod_p(G: AbelianGroup, p: int) -> int:
    """Dimension of ``G ⊗ Z_p`` over the field with ``p`` elements."""
    if not isprime(p):
        raise NotPrimeError(f"{p} is not prime")
    return G.free_rank + sum(1 for m in G.torsion if m % p == 0)


def _closure_with(
    subgroup: frozenset[tuple[int, ...]],
    g: tuple[int, ...],
    moduli: tuple[int, ...],
) -> frozenset[tuple[int, ...]]:
    """The subgroup generated by ``subgroup`` and ``g``."""
    elements = set(subgroup)
    shift = g
    while shift not in subgroup:
        elements.update(
            tuple((a + b) % m for a, b, m in zip(h, shift, moduli, strict=True))
            for h in subgroup
        )
        shift = tuple((a + b) % m for a, b, m in zip(shift, g, moduli, strict=True))
    return frozenset(elements)


@lru_cache(maxsize=256)
def minimal_generators_bruteforce(G: AbelianGroup) -> int:
    """Smallest size of a generating set, found by exhaustive search.

    The group is materialised as tuples under componentwise addition. Level
    ``j`` of the search holds the subgroups generated by ``j`` elements,
    grown one adjoined element at a time; an element already inside an
    enlargement found for the same subgroup is skipped, since it can only
    lead to a smaller subgroup. The first level that contains the whole
    group gives the answer.
    """
    if not G.is_finite():
        raise OracleLimitError("brute-force generator search needs a finite group")
    order = G.order()
    if order > BRUTEFORCE_ORDER_CAP:
        raise OracleLimitError(
            f"group of order {order} exceeds the brute-force cap "
            f"{BRUTEFORCE_ORDER_CAP}"
        )

    moduli = G.torsion
    elements = list(itertools.product(*(range(m) for m in moduli)))
    zero = tuple(0 for _ in moduli)
    level = {frozenset([zero])}
    size = 0
    while not any(len(H) == order for H in level):
        size += 1
        next_level: set[frozenset[tuple[int, ...]]] = set()
        for H in level:
            covered: set[tuple[int, ...]] = set(H)
            for g in elements:
                if g in covered:
                    continue
                grown = _closure_with(H, g, moduli)
                next_level.add(grown)
                # Adjoining any element of `grown` stays inside `grown`.
                covered.update(grown)
        level = next_level
        logger.debug("generator search level %d: %d subgroups", size, len(level))
    return size


def exact_sequence_ranks(n: int, L: Lattice, M: Lattice) -> tuple[int, int, int]:
    """Ranks of ``A = M/L``, ``B = Zⁿ/L``, ``C = Zⁿ/M`` for ``L ⊆ M ⊆ Zⁿ``.

    These fit into ``0 -> A -> B -> C -> 0`` and always satisfy
    ``rk B <= rk A + rk C``.
    """
    for lattice in (L, M):
        if lattice.ambient_dim != n:
            raise DimensionMismatchError(n, lattice.ambient_dim, "ambient dimension")
    if not lattice_contains(M, L):
        raise ContainmentError("exact sequence needs L ⊆ M")
    relations = relative_coordinates(M, L)
    rk_a = rank(quotient_structure(M.rank, lattice_from_matrix(relations)))
    rk_b = rank(quotient_structure(n, L))
    rk_c = rank(quotient_structure(n, M))
    return rk_a, rk_b, rk_c


def relative_quotient(outer: Lattice, inner: Lattice) -> AbelianGroup:
    """The group ``outer / inner`` for ``inner ⊆ outer``."""
    if not lattice_contains(outer, inner):
        raise ContainmentError("relative quotient needs inner ⊆ outer")
    relations = relative_coordinates(outer, inner)
    return quotient_structure(outer.rank, lattice_from_matrix(relations))
