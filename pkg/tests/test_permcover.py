"""Tests for permutation monodromy of torus coverings."""

from __future__ import annotations

import itertools

import pytest
from sympy.combinatorics import Permutation as SympyPermutation
from sympy.combinatorics import PermutationGroup
from tests.conftest import lattice

from toruscover.abgroup import quotient_structure
from toruscover.exceptions import (
    CapExceededError,
    InputError,
    NonCommutingError,
    ShapeError,
)
from toruscover.lattice_core import Lattice, lattice_equal
from toruscover.permcover import (
    PermAction,
    Permutation,
    check_commuting,
    cyclic_action,
    group_closure,
    is_even_only,
    kernel_lattice,
    monodromy_order,
    orbits,
    product_action,
)


def _perm(size: int, *cycles: tuple[int, ...]) -> Permutation:
    return Permutation.from_cycles(size, cycles)


def _random_commuting_action(rng, n: int) -> PermAction:
    """Generators drawn from the cyclic groups of a product of cycles."""
    lengths = [rng.randint(1, 4) for _ in range(rng.randint(1, 3))]
    base = product_action(*(cyclic_action(m) for m in lengths))
    return PermAction(
        base.fiber_size,
        tuple(
            base.evaluate([rng.randint(-3, 3) for _ in range(base.n)]) for _ in range(n)
        ),
    )


class TestPermutation:
    def test_rejects_non_bijection(self):
        with pytest.raises(InputError):
            Permutation((0, 0, 1))

    def test_compose_applies_right_first(self):
        a = _perm(3, (0, 1))
        b = _perm(3, (1, 2))
        assert a.compose(b)(1) == a(b(1)) == 2

    def test_order_parity_and_cycles(self):
        g = _perm(4, (0, 1), (2, 3))
        assert g.order() == 2
        assert g.is_even()
        assert g.cycle_notation() == "(0 1)(2 3)"
        assert Permutation.identity(3).cycle_notation() == "()"

    def test_power(self):
        g = _perm(3, (0, 1, 2))
        assert g.power(3).is_identity()
        assert g.power(-1) == g.inverse() == g.power(2)


class TestCheckCommuting:
    def test_equal_generators(self):
        assert check_commuting(PermAction.from_images([[1, 0], [1, 0]]))

    def test_powers_of_one_cycle(self):
        assert check_commuting(PermAction.from_images([[1, 2, 0], [2, 0, 1]]))

    def test_overlapping_transpositions(self):
        assert not check_commuting(PermAction.from_images([[1, 0, 2], [0, 2, 1]]))


class TestKernelLattice:
    def test_three_cycle(self):
        assert lattice_equal(kernel_lattice(cyclic_action(3)), lattice([[3]], 1))

    def test_equal_transpositions(self):
        L = kernel_lattice(PermAction.from_images([[1, 0], [1, 0]]))
        assert lattice_equal(L, lattice([[1, 1], [0, 2]], 2))

    def test_identity_action(self):
        L = kernel_lattice(PermAction.from_images([[0, 1, 2], [0, 1, 2]]))
        assert lattice_equal(L, Lattice.full(2))

    def test_non_commuting_rejected(self):
        with pytest.raises(NonCommutingError):
            kernel_lattice(PermAction.from_images([[1, 0, 2], [0, 2, 1]]))

    def test_cap_names_the_limit(self):
        with pytest.raises(CapExceededError, match="10"):
            kernel_lattice(product_action(cyclic_action(4), cyclic_action(3)), cap=10)

    def test_basis_rows_act_trivially(self, rng):
        for _ in range(40):
            a = _random_commuting_action(rng, rng.randint(1, 3))
            L = kernel_lattice(a)
            for row in L.to_rows():
                assert a.evaluate(row).is_identity()

    def test_membership_matches_evaluation(self, rng):
        for _ in range(40):
            a = _random_commuting_action(rng, rng.randint(1, 3))
            L = kernel_lattice(a)
            for v in itertools.product(range(-4, 5), repeat=a.n):
                assert (v in L) == a.evaluate(v).is_identity()

    def test_quotient_order_is_group_order(self, rng):
        for _ in range(40):
            a = _random_commuting_action(rng, rng.randint(1, 3))
            G = quotient_structure(a.n, kernel_lattice(a))
            oracle = PermutationGroup(
                [SympyPermutation(list(g.images)) for g in a.generators]
            ).order()
            assert G.order() == monodromy_order(a) == oracle


class TestOrbits:
    def test_transitive_cycle(self):
        assert orbits(cyclic_action(3)) == [[0, 1, 2]]

    def test_two_blocks(self):
        a = PermAction(4, (_perm(4, (0, 1)), _perm(4, (2, 3))))
        assert orbits(a) == [[0, 1], [2, 3]]

    def test_identity(self):
        assert orbits(PermAction.from_images([[0, 1, 2]])) == [[0], [1], [2]]


class TestGroupClosure:
    def test_single_transposition(self):
        assert group_closure([_perm(2, (0, 1))]) == [
            Permutation.identity(2),
            _perm(2, (0, 1)),
        ]

    def test_disjoint_transpositions(self):
        assert len(group_closure([_perm(4, (0, 1)), _perm(4, (2, 3))])) == 4

    def test_empty(self):
        assert group_closure([], fiber_size=3) == [Permutation.identity(3)]

    def test_cap(self):
        with pytest.raises(CapExceededError):
            group_closure([_perm(5, (0, 1, 2, 3, 4)), _perm(5, (0, 1))], cap=20)

    def test_mixed_sizes_rejected(self):
        with pytest.raises(ShapeError):
            group_closure([_perm(2, (0, 1)), _perm(3, (0, 1))])


class TestParity:
    def test_double_transposition(self):
        assert is_even_only([_perm(4, (0, 1), (2, 3))])

    def test_transposition(self):
        assert not is_even_only([_perm(2, (0, 1))])

    def test_klein_four(self):
        assert is_even_only([_perm(4, (0, 1), (2, 3)), _perm(4, (0, 2), (1, 3))])

    def test_generators_decide_the_group(self, rng):
        for _ in range(30):
            a = _random_commuting_action(rng, rng.randint(1, 3))
            elements = group_closure(a.generators)
            assert is_even_only(a.generators) == all(g.is_even() for g in elements)


class TestConstructions:
    def test_cyclic_action(self):
        a = cyclic_action(4)
        assert a.fiber_size == 4
        assert a.generators[0].order() == 4
        with pytest.raises(InputError):
            cyclic_action(0)

    def test_product_action_kernel(self):
        a = product_action(cyclic_action(2), cyclic_action(2))
        assert a.fiber_size == 4
        assert lattice_equal(kernel_lattice(a), lattice([[2, 0], [0, 2]], 2))

    def test_generator_size_checked(self):
        with pytest.raises(ShapeError):
            PermAction(3, (_perm(2, (0, 1)),))
