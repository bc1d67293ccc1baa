"""Monodromy of torus coverings as commuting permutations of a finite fiber."""

from __future__ import annotations

import itertools
import logging
from collections import deque
from collections.abc import Sequence
from dataclasses import dataclass
from math import prod

from sympy.combinatorics import Permutation as SympyPermutation

from toruscover.config import DEFAULT_CAP
from toruscover.exceptions import (
    CapExceededError,
    InputError,
    NonCommutingError,
    ShapeError,
)
from toruscover.lattice_core import Lattice, lattice_from_rows

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class Permutation:
    """A bijection of ``{0, ..., f-1}`` in one-line notation."""

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.images) != list(range(len(self.images))):
            raise InputError(f"not a permutation: {list(self.images)}")

    @classmethod
    def identity(cls, size: int) -> Permutation:
        return cls(tuple(range(size)))

    @classmethod
    def from_cycles(cls, size: int, cycles: Sequence[Sequence[int]]) -> Permutation:
        images = list(range(size))
        for cycle in cycles:
            for a, b in zip(cycle, [*cycle[1:], cycle[0]], strict=True):
                images[a] = b
        return cls(tuple(images))

    @property
    def size(self) -> int:
        return len(self.images)

    def __call__(self, point: int) -> int:
        return self.images[point]

    def compose(self, other: Permutation) -> Permutation:
        """``self ∘ other``: apply ``other`` first."""
        return Permutation(tuple(self.images[i] for i in other.images))

    def inverse(self) -> Permutation:
        inverse = [0] * self.size
        for i, image in enumerate(self.images):
            inverse[image] = i
        return Permutation(tuple(inverse))

    def power(self, exponent: int) -> Permutation:
        base = self if exponent >= 0 else self.inverse()
        result = Permutation.identity(self.size)
        for _ in range(abs(exponent) % self.order()):
            result = base.compose(result)
        return result

    def is_identity(self) -> bool:
        return all(i == image for i, image in enumerate(self.images))

    def _sympy(self) -> SympyPermutation:
        return SympyPermutation(list(self.images), size=self.size)

    def order(self) -> int:
        return int(self._sympy().order()) if self.size else 1

    def is_even(self) -> bool:
        return bool(self._sympy().is_even) if self.size else True

    def cycle_notation(self) -> str:
        """0-based cycle notation, e.g. ``(0 1)(2 3)``; ``()`` for the identity."""
        cycles = self._sympy().cyclic_form if self.size else []
        return "".join(
            "(" + " ".join(str(i) for i in cycle) + ")" for cycle in cycles
        ) or "()"

    def __str__(self) -> str:
        return self.cycle_notation()


@dataclass(frozen=True)
class PermAction:
    """Images of the torus generators ``γ_1, ..., γ_n`` on a fiber of size f."""

    fiber_size: int
    generators: tuple[Permutation, ...]

    def __post_init__(self) -> None:
        if self.fiber_size < 1:
            raise InputError(f"fiber size must be >= 1, got {self.fiber_size}")
        for g in self.generators:
            if g.size != self.fiber_size:
                raise ShapeError(
                    f"generator {list(g.images)} does not act on "
                    f"{self.fiber_size} points"
                )

    @classmethod
    def from_images(
        cls, images: Sequence[Sequence[int]], fiber_size: int | None = None
    ) -> PermAction:
        generators = tuple(Permutation(tuple(g)) for g in images)
        if fiber_size is None:
            if not generators:
                raise InputError("fiber size required for an action with no generators")
            fiber_size = generators[0].size
        return cls(fiber_size, generators)

    @property
    def n(self) -> int:
        return len(self.generators)

    def evaluate(self, v: Sequence[int]) -> Permutation:
        """The monodromy ``g_1^{v_1} ... g_n^{v_n}`` of the loop ``v``."""
        if len(v) != self.n:
            raise ShapeError(f"loop of length {len(v)} for {self.n} generators")
        result = Permutation.identity(self.fiber_size)
        for g, e in zip(self.generators, v, strict=True):
            if e:
                result = g.power(e).compose(result)
        return result

    def to_images(self) -> list[list[int]]:
        return [list(g.images) for g in self.generators]


def check_commuting(a: PermAction) -> bool:
    return all(
        g.compose(h) == h.compose(g)
        for g, h in itertools.combinations(a.generators, 2)
    )


def kernel_lattice(a: PermAction, cap: int = DEFAULT_CAP) -> Lattice:
    """Loops ``v ∈ Zⁿ`` acting trivially on the fiber.

    Breadth-first closure keeps every reached group element with one
    discrete-log vector; each collision contributes the difference of two
    vectors as a relation. The relations together with ``diag(ord g_i)``
    span the kernel.
    """
    if not check_commuting(a):
        raise NonCommutingError("torus monodromy generators must commute")
    orders = [g.order() for g in a.generators]
    bound = prod(orders)
    if bound > cap:
        raise CapExceededError(cap, f"product of generator orders is {bound}")

    n = a.n
    kernel = lattice_from_rows(
        ([orders[i] if i == j else 0 for j in range(n)] for i in range(n)), n
    )
    identity = Permutation.identity(a.fiber_size)
    logs: dict[Permutation, tuple[int, ...]] = {identity: (0,) * n}
    queue = deque([identity])
    while queue:
        element = queue.popleft()
        vector = logs[element]
        for i, g in enumerate(a.generators):
            image = g.compose(element)
            step = tuple(x + (j == i) for j, x in enumerate(vector))
            known = logs.get(image)
            if known is None:
                logs[image] = step
                queue.append(image)
                continue
            relation = [x - y for x, y in zip(step, known, strict=True)]
            if relation not in kernel:
                kernel = lattice_from_rows([*kernel.to_rows(), relation], n)
    logger.debug(
        "kernel lattice of %d generators: group order %d, index %s",
        n,
        len(logs),
        kernel.index(),
    )
    return kernel


def orbits(a: PermAction) -> list[list[int]]:
    """Orbits of the generated group, each sorted, ordered by least element."""
    seen: set[int] = set()
    result = []
    for start in range(a.fiber_size):
        if start in seen:
            continue
        orbit = {start}
        queue = deque([start])
        while queue:
            point = queue.popleft()
            for g in a.generators:
                image = g(point)
                if image not in orbit:
                    orbit.add(image)
                    queue.append(image)
        seen |= orbit
        result.append(sorted(orbit))
    return result


def group_closure(
    gens: Sequence[Permutation],
    cap: int = DEFAULT_CAP,
    *,
    fiber_size: int | None = None,
) -> list[Permutation]:
    """All products of ``gens``, sorted by one-line notation."""
    if not gens:
        return [Permutation.identity(fiber_size or 0)]
    size = gens[0].size
    if any(g.size != size for g in gens):
        raise ShapeError("generators act on fibers of different sizes")
    identity = Permutation.identity(size)
    elements = {identity}
    queue = deque([identity])
    while queue:
        element = queue.popleft()
        for g in gens:
            product = g.compose(element)
            if product not in elements:
                if len(elements) >= cap:
                    raise CapExceededError(cap, "group closure")
                elements.add(product)
                queue.append(product)
    return sorted(elements)


def is_even_only(gens: Sequence[Permutation]) -> bool:
    return all(g.is_even() for g in gens)


def monodromy_order(a: PermAction, cap: int = DEFAULT_CAP) -> int:
    return len(group_closure(a.generators, cap, fiber_size=a.fiber_size))


def cyclic_action(m: int) -> PermAction:
    """The covering ``z -> z^m`` of the circle: an m-cycle on m points."""
    if m < 1:
        raise InputError(f"cyclic covering degree must be >= 1, got {m}")
    return PermAction(m, (Permutation(tuple((i + 1) % m for i in range(m))),))


def product_action(*actions: PermAction) -> PermAction:
    """Product covering over the product torus.

    The fiber is the Cartesian product of the fibers, indexed
    lexicographically; each generator moves only its own factor.
    """
    if not actions:
        return PermAction(1, ())
    sizes = [a.fiber_size for a in actions]
    points = list(itertools.product(*(range(s) for s in sizes)))
    index = {point: i for i, point in enumerate(points)}
    generators = []
    for position, action in enumerate(actions):
        for g in action.generators:
            generators.append(
                Permutation(
                    tuple(
                        index[(*p[:position], g(p[position]), *p[position + 1 :])]
                        for p in points
                    )
                )
            )
    return PermAction(len(points), tuple(generators))
