"""Coverings over the torus Tⁿ, classified by their kernel lattice in Zⁿ.

A loop ``u ∈ Zⁿ ≅ π₁(Tⁿ)`` lies in the kernel when it lifts to closed loops
through every point of the fiber. Two coverings are equivalent exactly when
their kernels agree, so every decision procedure here works on lattices.

Torus maps follow the row-vector convention: a map ``Tᵃ -> Tᵇ`` is an
integer ``a x b`` matrix ``F`` sending the loop ``u`` to ``u · F``.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Sequence
from dataclasses import dataclass

from toruscover.abgroup import AbelianGroup, quotient_structure, rank, relative_quotient
from toruscover.config import DEFAULT_CAP
from toruscover.exceptions import (
    CapExceededError,
    ComputationError,
    DimensionMismatchError,
    InputError,
    RankDeficientError,
)
from toruscover.lattice_core import (
    IntMatrix,
    Lattice,
    lattice_contains,
    lattice_equal,
    lattice_from_rows,
    left_kernel,
    smith_normal_form,
)
from toruscover.permcover import PermAction, Permutation, kernel_lattice

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TorusCovering:
    n: int
    kernel: Lattice

    def __post_init__(self) -> None:
        if self.kernel.ambient_dim != self.n:
            raise DimensionMismatchError(
                self.n, self.kernel.ambient_dim, "kernel dimension"
            )

    @classmethod
    def from_kernel_rows(cls, rows: Sequence[Sequence[int]], n: int) -> TorusCovering:
        return cls(n, lattice_from_rows(rows, n))


@dataclass(frozen=True)
class NormalForm:
    """Normal form ``ξ₁ˢ × ξ_{m₁} × ... × ξ_{m_t} × ξ_∞ʳ``.

    The cyclic orders form a divisibility chain ``m₁ | ... | m_t``.
    """

    s: int
    m: tuple[int, ...]
    r: int

    def __post_init__(self) -> None:
        if self.s < 0 or self.r < 0:
            raise InputError(
                f"negative factor count in normal form (s={self.s}, r={self.r})"
            )
        # Reuses the divisibility-chain validation.
        AbelianGroup(self.m, self.r)

    @property
    def n(self) -> int:
        return self.s + len(self.m) + self.r

    @property
    def k(self) -> int:
        return len(self.m) + self.r


@dataclass(frozen=True)
class SmithCoordinates:
    """Coordinates realising ``Zⁿ/kernel ≅ Z_{m_1} + ... + Z_{m_t} + Z^r``.

    The loop ``u`` maps to ``(u · V)_j`` for the columns ``j >= s`` of ``V``,
    read modulo ``m`` on the first ``t`` of them and exactly on the rest.
    """

    V: IntMatrix
    s: int
    torsion: tuple[int, ...]
    free_rank: int

    @property
    def k(self) -> int:
        return len(self.torsion) + self.free_rank

    def projection(self) -> IntMatrix:
        """The ``n x k`` block of ``V`` carrying the nontrivial coordinates."""
        return self.V.select(cols=range(self.s, self.V.cols))


def smith_coordinates(c: TorusCovering) -> SmithCoordinates:
    decomposition = smith_normal_form(c.kernel.basis)
    diagonal = decomposition.diagonal
    s = sum(1 for d in diagonal if d == 1)
    return SmithCoordinates(
        V=decomposition.V,
        s=s,
        torsion=tuple(d for d in diagonal if d >= 2),
        free_rank=c.n - c.kernel.rank,
    )


def from_perm_action(a: PermAction, cap: int = DEFAULT_CAP) -> TorusCovering:
    return TorusCovering(a.n, kernel_lattice(a, cap))


def classify(c: TorusCovering) -> NormalForm:
    coords = smith_coordinates(c)
    return NormalForm(s=coords.s, m=coords.torsion, r=coords.free_rank)


def monodromy_group(c: TorusCovering) -> AbelianGroup:
    return quotient_structure(c.n, c.kernel)


def min_inducing_dim(c: TorusCovering) -> int:
    """Least ``k`` such that ``c`` is induced from a covering over ``Tᵏ``."""
    return classify(c).k


def is_inducible_from(c: TorusCovering, k: int) -> bool:
    if k < 0:
        raise InputError(f"dimension must be nonnegative, got {k}")
    return k >= min_inducing_dim(c)


def not_dominated_below(c: TorusCovering, k: int) -> bool:
    """True iff no covering induced from dimension ``< k`` dominates ``c``."""
    return min_inducing_dim(c) >= k


def is_equivalent(c1: TorusCovering, c2: TorusCovering) -> bool:
    return lattice_equal(c1.kernel, c2.kernel)


def dominates(c1: TorusCovering, c2: TorusCovering) -> bool:
    """Whether ``c1`` covers ``c2``, for connected total spaces.

    The connected covering with kernel ``L1`` factors through the one with
    kernel ``L2`` exactly when ``L1 ⊆ L2``.
    """
    return lattice_contains(c2.kernel, c1.kernel)


def standard_covering(nf: NormalForm) -> TorusCovering:
    diagonal = [1] * nf.s + list(nf.m) + [0] * nf.r
    rows = [[d if i == j else 0 for j in range(nf.n)] for i, d in enumerate(diagonal)]
    return TorusCovering.from_kernel_rows(rows, nf.n)


def induce(base: TorusCovering, F: IntMatrix) -> TorusCovering:
    """The covering induced from ``base`` over ``Tᵏ`` along ``F: Tⁿ -> Tᵏ``.

    ``F`` is ``n x k``; the induced kernel is ``{u : u · F ∈ base.kernel}``.
    """
    if F.cols != base.n:
        raise DimensionMismatchError(base.n, F.cols, "torus map target dimension")
    n = F.rows
    if base.kernel.index() == 1:
        return TorusCovering(n, Lattice.full(n))
    # (u, w) with u·F = w·B, B the kernel basis of the base.
    negated = IntMatrix.from_rows(
        ([-x for x in row] for row in base.kernel.to_rows()), base.n
    )
    relations = left_kernel(F.stack(negated))
    return TorusCovering(
        n,
        lattice_from_rows((relations.row(i)[:n] for i in range(relations.rows)), n),
    )


def inducing_certificate(c: TorusCovering) -> tuple[IntMatrix, TorusCovering]:
    """A torus map ``F`` and a base over ``Tᵏ`` with ``induce(base, F) ≅ c``.

    ``k`` is :func:`min_inducing_dim`; the base is ``ξ_{m₁} × ... × ξ_∞ʳ``
    and ``F`` is surjective on fundamental groups.
    """
    coords = smith_coordinates(c)
    base = standard_covering(NormalForm(0, coords.torsion, coords.free_rank))
    return coords.projection(), base


def _require_full_rank(H: Lattice, what: str) -> None:
    if not H.is_full_rank():
        raise RankDeficientError(
            f"{what} has rank {H.rank} in Z^{H.ambient_dim}; "
            "a torus covering a torus needs a full-rank sublattice"
        )


def pullback(c: TorusCovering, H: Lattice) -> TorusCovering:
    """Pull ``c`` back along the connected torus covering with π₁-image ``H``.

    The result lives over the covering torus, in coordinates of ``H``'s
    canonical basis; its monodromy group is the image of ``H`` in
    ``Zⁿ/kernel``.
    """
    if H.ambient_dim != c.n:
        raise DimensionMismatchError(c.n, H.ambient_dim, "sublattice dimension")
    _require_full_rank(H, "pullback sublattice")
    return induce(c, H.basis)


def tower_rank_bound(k: int, dims: Sequence[int]) -> int:
    if k < 0 or any(d < 0 for d in dims):
        raise InputError(
            f"tower bound needs nonnegative counts, got k={k}, dims={list(dims)}"
        )
    return max(0, k - sum(dims))


def tower_ranks(n: int, chain: Sequence[Lattice]) -> tuple[list[int], int]:
    """Stage ranks ``rk H_{i-1}/H_i`` and the composite rank ``rk Zⁿ/H_s``.

    ``chain`` lists ``H_1 ⊇ H_2 ⊇ ...`` below ``H_0 = Zⁿ``.
    """
    previous = Lattice.full(n)
    stages = []
    for i, H in enumerate(chain, start=1):
        if H.ambient_dim != n:
            raise DimensionMismatchError(n, H.ambient_dim, "tower stage dimension")
        _require_full_rank(H, f"tower stage {i}")
        stages.append(rank(relative_quotient(previous, H)))
        previous = H
    composite = rank(quotient_structure(n, previous))
    if composite > sum(stages):
        raise ComputationError(
            f"tower composite rank {composite} exceeds stage total {sum(stages)}"
        )
    logger.debug(
        "tower of %d stages: ranks %s, composite %d", len(stages), stages, composite
    )
    return stages, composite


def regular_action(c: TorusCovering, cap: int = DEFAULT_CAP) -> PermAction:
    """The Galois covering with fiber ``Zⁿ/kernel``, loops acting by translation.

    Fiber points are the residue tuples in Smith coordinates, indexed
    lexicographically.
    """
    coords = smith_coordinates(c)
    if coords.free_rank:
        raise ComputationError("regular action needs finite monodromy")
    moduli = coords.torsion
    points = list(itertools.product(*(range(m) for m in moduli)))
    if len(points) > cap:
        raise CapExceededError(cap, f"fiber of size {len(points)}")
    index = {point: i for i, point in enumerate(points)}
    F = coords.projection()

    def translate(point: tuple[int, ...], shift: tuple[int, ...]) -> int:
        moved = (
            (x + d) % m for x, d, m in zip(point, shift, moduli, strict=True)
        )
        return index[tuple(moved)]

    generators = tuple(
        Permutation(tuple(translate(p, F.row(i)) for p in points))
        for i in range(c.n)
    )
    return PermAction(len(points), generators)
