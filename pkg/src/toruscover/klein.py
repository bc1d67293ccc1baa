"""Klein's resolvent problem on the algebraic torus.

Radical systems ``x^{a_1/m_1}, ..., x^{a_s/m_s}`` reduce to torus coverings:
the loop ``u`` multiplies ``x^{a/m}`` by ``exp(2πi (u·a)/m)``, so the branches
are invariant exactly on the congruence lattice ``{u : u·a_j ≡ 0 mod m_j}``.
The number of parameters such a function really depends on is the rank of
its monodromy group.

Near a degenerate point of the universal polynomial, local monodromy is the
stabilizer of a flag of coordinate subspaces of root space; ``LinearFlag``
and ``flag_stabilizer`` compute it by exhaustive search.
"""

from __future__ import annotations

import itertools
import logging
import re
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

from toruscover.abgroup import quotient_structure, rank
from toruscover.config import DEFAULT_CAP
from toruscover.exceptions import (
    CapExceededError,
    ComputationError,
    FlagError,
    InputError,
    NonAbelianError,
    ShapeError,
)
from toruscover.lattice_core import (
    IntMatrix,
    Lattice,
    RationalRowSpace,
    congruence_kernel,
)
from toruscover.permcover import (
    PermAction,
    Permutation,
    check_commuting,
    group_closure,
    is_even_only,
    kernel_lattice,
)
from toruscover.torus_cover import TorusCovering, min_inducing_dim, smith_coordinates

logger = logging.getLogger(__name__)

# Stabilizers are found by scanning all of S_n.
FLAG_SEARCH_MAX_N = 8

_RADICAL_RE = re.compile(r"^\s*(-?\d+(?:\s*,\s*-?\d+)*)\s*:\s*(\d+)\s*$")


@dataclass(frozen=True)
class Radical:
    """The multivalued monomial ``x^{exponents/index}``."""

    exponents: tuple[int, ...]
    index: int

    def __post_init__(self) -> None:
        if self.index < 1:
            raise InputError(f"radical index must be >= 1, got {self.index}")

    @classmethod
    def parse(cls, text: str) -> Radical:
        """Parse ``"a1,...,an:m"``."""
        match = _RADICAL_RE.match(text)
        if match is None:
            raise InputError(f"radical must look like 'a1,...,an:m', got {text!r}")
        exponents = tuple(int(a) for a in match.group(1).split(","))
        return cls(exponents, int(match.group(2)))

    def render(self) -> str:
        return ",".join(str(a) for a in self.exponents) + f":{self.index}"


@dataclass(frozen=True)
class RadicalSystem:
    n: int
    radicals: tuple[Radical, ...] = ()
    names: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        for radical in self.radicals:
            if len(radical.exponents) != self.n:
                raise ShapeError(
                    f"radical {radical.render()} has {len(radical.exponents)} "
                    f"exponents for {self.n} variables"
                )
        if self.names and len(self.names) != self.n:
            raise ShapeError(f"{len(self.names)} variable names for {self.n} variables")

    @classmethod
    def parse(cls, n: int, texts: Sequence[str]) -> RadicalSystem:
        return cls(n, tuple(Radical.parse(t) for t in texts))

    @property
    def variables(self) -> tuple[str, ...]:
        return self.names or tuple(f"x{i + 1}" for i in range(self.n))


def radical_kernel(rs: RadicalSystem) -> TorusCovering:
    if not rs.radicals:
        return TorusCovering(rs.n, Lattice.full(rs.n))
    exponents = IntMatrix.from_rows((r.exponents for r in rs.radicals), rs.n)
    return TorusCovering(
        rs.n, congruence_kernel(exponents, [r.index for r in rs.radicals])
    )


def essential_dimension(rs: RadicalSystem) -> int:
    return min_inducing_dim(radical_kernel(rs))


def _check_dims(dims: Sequence[int]) -> None:
    if any(d < 0 for d in dims):
        raise InputError(f"tower dimensions must be nonnegative, got {list(dims)}")


def tower_feasible(rs: RadicalSystem, dims: Sequence[int]) -> bool:
    """Whether a tower of extensions of dimensions ``dims`` can dominate ``rs``."""
    _check_dims(dims)
    return sum(dims) >= essential_dimension(rs)


def tower_certificate(rs: RadicalSystem, dims: Sequence[int]) -> list[Lattice]:
    """An explicit dominating tower ``Zⁿ ⊇ H_1 ⊇ ... ⊇ H_s``.

    Stage ``j`` adjoins the next ``dims[j]`` radicals of the Smith
    decomposition, so it has rank at most ``dims[j]``; the last stage lies
    inside the radical kernel.
    """
    _check_dims(dims)
    c = radical_kernel(rs)
    coords = smith_coordinates(c)
    if sum(dims) < coords.k:
        raise ComputationError(
            f"towers of dimensions {list(dims)} cannot dominate a function "
            f"with {coords.k} essential parameters"
        )
    projection = coords.projection()
    chain = []
    adjoined = 0
    for d in dims:
        adjoined = min(coords.k, adjoined + d)
        congruences = IntMatrix.from_rows(
            (projection.column(j) for j in range(adjoined)), rs.n
        )
        chain.append(congruence_kernel(congruences, coords.torsion[:adjoined]))
    return chain


def universal_lower_bound(n: int) -> tuple[int, RadicalSystem]:
    """Parameters needed by the roots of the universal degree-``n`` polynomial.

    The certificate is the specialisation to ``∏ (w - a_i)² - s_i`` whose roots
    ``a_i ± √s_i`` have monodromy ``Z_2^k`` for ``k = ⌊n/2⌋``.
    """
    if n < 1:
        raise InputError(f"degree must be >= 1, got {n}")
    k = n // 2
    names = [f"a{i + 1}" for i in range(k)] + [f"s{i + 1}" for i in range(k)]
    if n % 2:
        names.append(f"a{k + 1}")
    dim = len(names)
    radicals = tuple(
        Radical(tuple(int(j == k + i) for j in range(dim)), 2) for i in range(k)
    )
    return k, RadicalSystem(dim, radicals, tuple(names))


def universal_disc_lower_bound(n: int) -> tuple[int, PermAction]:
    """The bound ``2⌊n/4⌋`` with an even monodromy certificate on ``n`` roots.

    Block ``i`` holds the roots ``a_i ± √s_i ± √t_i + b_i √(s_i t_i)``. The
    loop around ``s_i`` acts as ``(4i 4i+1)(4i+2 4i+3)`` and the loop around
    ``t_i`` as ``(4i 4i+2)(4i+1 4i+3)``; remaining roots stay fixed.
    """
    if n < 1:
        raise InputError(f"degree must be >= 1, got {n}")
    m = n // 4
    generators = []
    for i in range(m):
        b = 4 * i
        generators.append(Permutation.from_cycles(n, [(b, b + 1), (b + 2, b + 3)]))
        generators.append(Permutation.from_cycles(n, [(b, b + 2), (b + 1, b + 3)]))
    return 2 * m, PermAction(n, tuple(generators))


def disc_radical_certificate(n: int) -> RadicalSystem:
    """Radicals ``√s_i, √t_i, √(s_i t_i)`` on the ``(a, b, s, t)`` torus."""
    if n < 1:
        raise InputError(f"degree must be >= 1, got {n}")
    m = n // 4
    names = [f"{letter}{i + 1}" for letter in "abst" for i in range(m)]
    if n % 4:
        names.append(f"a{m + 1}")
    dim = len(names)

    def monomial(*positions: int) -> tuple[int, ...]:
        return tuple(int(j in positions) for j in range(dim))

    radicals = []
    for i in range(m):
        s, t = 2 * m + i, 3 * m + i
        radicals += [
            Radical(monomial(s), 2),
            Radical(monomial(t), 2),
            Radical(monomial(s, t), 2),
        ]
    return RadicalSystem(dim, tuple(radicals), tuple(names))


# -- Flags --------------------------------------------------------------------


@dataclass(frozen=True)
class LinearFlag:
    """A strictly decreasing chain of subspaces of root space.

    Step ``i`` is the solution set of the equation system ``steps[i]``; each
    row ``c`` means ``Σ c_j z_j = 0``. Systems are cumulative.
    """

    n: int
    steps: tuple[IntMatrix, ...]

    def __post_init__(self) -> None:
        previous: IntMatrix | None = None
        previous_rank = 0
        for i, system in enumerate(self.steps):
            if system.cols != self.n:
                raise ShapeError(
                    f"flag step {i} has {system.cols} coefficients "
                    f"for {self.n} coordinates"
                )
            space = RationalRowSpace(system)
            if previous is not None and not space.contains_all(previous):
                raise FlagError(f"flag step {i} does not lie inside step {i - 1}")
            if space.rank <= previous_rank:
                raise FlagError(f"flag step {i} does not cut out a smaller subspace")
            previous, previous_rank = system, space.rank

    @classmethod
    def from_increments(
        cls, n: int, increments: Sequence[Sequence[Sequence[int]]]
    ) -> LinearFlag:
        """Build from the equations each step adds to the one before."""
        rows: list[Sequence[int]] = []
        steps = []
        for block in increments:
            rows = [*rows, *block]
            steps.append(IntMatrix.from_rows(rows, n))
        return cls(n, tuple(steps))

    def to_rows(self) -> list[list[list[int]]]:
        return [system.to_rows() for system in self.steps]


def _preserves(
    sigma: tuple[int, ...], system: IntMatrix, space: RationalRowSpace
) -> bool:
    return all(
        space.contains([row[sigma[j]] for j in range(len(sigma))])
        for row in system.to_rows()
    )


def flag_stabilizer(flag: LinearFlag) -> list[Permutation]:
    """Permutations of the coordinates mapping every step onto itself.

    A permutation carries ``{E z = 0}`` onto itself iff the permuted
    equations stay in the rational row space of ``E``. Sorted by one-line
    notation.
    """
    if flag.n > FLAG_SEARCH_MAX_N:
        raise CapExceededError(
            FLAG_SEARCH_MAX_N, f"stabilizer search over S_{flag.n}"
        )
    candidates = list(itertools.permutations(range(flag.n)))
    for system in flag.steps:
        space = RationalRowSpace(system)
        candidates = [sigma for sigma in candidates if _preserves(sigma, system, space)]
        logger.debug(
            "flag step of rank %d: %d candidates left", space.rank, len(candidates)
        )
    return [Permutation(sigma) for sigma in candidates]


def flag_rank(flag: LinearFlag, cap: int = DEFAULT_CAP) -> tuple[int, bool]:
    """Rank of the (abelian) flag stabilizer and whether it is even."""
    elements = flag_stabilizer(flag)
    generators: list[Permutation] = []
    closure = {Permutation.identity(flag.n)}
    for g in elements:
        if g not in closure:
            generators.append(g)
            closure = set(group_closure(generators, cap))
    action = PermAction(flag.n, tuple(generators))
    if not check_commuting(action):
        raise NonAbelianError(len(elements))
    group = quotient_structure(action.n, kernel_lattice(action, cap))
    return rank(group), is_even_only(generators)


def _equation(n: int, coefficients: Mapping[int, int]) -> list[int]:
    return [coefficients.get(j, 0) for j in range(n)]


def _completed_flag(
    n: int,
    increments: list[list[list[int]]],
    blocks: list[list[int]],
) -> LinearFlag:
    """Continue the listed steps down to the origin.

    Each block is collapsed onto its first coordinate, then every coordinate
    is equated with ``z_1`` in turn, then ``z_1 = 0``. Without blocks the
    coordinates are zeroed one at a time instead. Equations implied by the
    steps so far are skipped.
    """
    rows = [row for block in increments for row in block]
    if blocks:
        tail = [
            _equation(n, {block[0]: 1, j: -1})
            for block in blocks
            for j in block[1:]
        ]
        tail += [_equation(n, {0: 1, j: -1}) for j in range(1, n)]
        tail.append(_equation(n, {0: 1}))
    else:
        tail = [_equation(n, {j: 1}) for j in range(n)]
    steps = list(increments)
    for equation in tail:
        if RationalRowSpace(IntMatrix.from_rows(rows, n)).contains(equation):
            continue
        rows.append(equation)
        steps.append([equation])
    return LinearFlag.from_increments(n, steps)


def pairing_flag(n: int) -> LinearFlag:
    """``z_1 = z_2 ⊃ {.., z_3 = z_4} ⊃ ...`` over ``⌊n/2⌋`` pairs, completed."""
    if n < 1:
        raise InputError(f"degree must be >= 1, got {n}")
    blocks = [[2 * p, 2 * p + 1] for p in range(n // 2)]
    increments = [[_equation(n, {a: 1, b: -1})] for a, b in blocks]
    return _completed_flag(n, increments, blocks)


def quadruple_flag(n: int) -> LinearFlag:
    """Per quadruple: ``z_1 + z_2 = z_3 + z_4``, then ``z_1 = z_3, z_2 = z_4``."""
    if n < 1:
        raise InputError(f"degree must be >= 1, got {n}")
    blocks = [[4 * q + i for i in range(4)] for q in range(n // 4)]
    increments = []
    for a, b, c, d in blocks:
        increments.append([_equation(n, {a: 1, b: 1, c: -1, d: -1})])
        increments.append([_equation(n, {a: 1, c: -1}), _equation(n, {b: 1, d: -1})])
    return _completed_flag(n, increments, blocks)
