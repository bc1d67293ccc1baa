"""Exact integer linear algebra: Hermite and Smith normal forms, lattices.

Matrices are small, immutable and carry Python integers, so intermediate
growth during elimination never overflows. Heavier rational work
(determinants, ranks, reduced echelon forms) is delegated to sympy's
``DomainMatrix`` over ``ZZ``/``QQ``.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

from sympy.core.intfunc import igcdex
from sympy.polys.domains import QQ, ZZ
from sympy.polys.matrices import DomainMatrix

from toruscover.exceptions import (
    ContainmentError,
    DimensionMismatchError,
    InputError,
    ShapeError,
)

logger = logging.getLogger(__name__)


def _dot(u: Sequence[int], v: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(u, v, strict=True))


@dataclass(frozen=True)
class IntMatrix:
    """Arbitrary-precision integer matrix stored row-major."""

    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise ShapeError(f"negative shape {self.rows}x{self.cols}")
        if len(self.entries) != self.rows * self.cols:
            raise ShapeError(
                f"{len(self.entries)} entries do not fill a "
                f"{self.rows}x{self.cols} matrix"
            )

    # -- Constructors ---------------------------------------------------------

    @classmethod
    def from_rows(
        cls, rows: Iterable[Sequence[int]], cols: int | None = None
    ) -> IntMatrix:
        """Build a matrix from nested rows.

        ``cols`` is required when ``rows`` is empty, otherwise it is checked.
        """
        data = [tuple(int(x) for x in row) for row in rows]
        if cols is None:
            if not data:
                raise ShapeError("column count required for a matrix with no rows")
            cols = len(data[0])
        for row in data:
            if len(row) != cols:
                raise ShapeError(f"ragged row of length {len(row)}, expected {cols}")
        return cls(len(data), cols, tuple(x for row in data for x in row))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    @classmethod
    def diagonal(cls, values: Sequence[int], cols: int | None = None) -> IntMatrix:
        cols = len(values) if cols is None else cols
        return cls.from_rows(
            ([int(i == j) * v for j in range(cols)] for i, v in enumerate(values)),
            cols,
        )

    # -- Access ---------------------------------------------------------------

    def __getitem__(self, index: tuple[int, int]) -> int:
        i, j = index
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_zero(self) -> bool:
        return not any(self.entries)

    # -- Arithmetic -----------------------------------------------------------

    def transpose(self) -> IntMatrix:
        return IntMatrix.from_rows(
            (self.column(j) for j in range(self.cols)), self.rows
        )

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise ShapeError(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        other_cols = [other.column(j) for j in range(other.cols)]
        return IntMatrix.from_rows(
            (
                [_dot(self.row(i), col) for col in other_cols]
                for i in range(self.rows)
            ),
            other.cols,
        )

    def row_times(self, v: Sequence[int]) -> tuple[int, ...]:
        """Row vector times matrix: ``v · self``."""
        if len(v) != self.rows:
            raise ShapeError(f"vector of length {len(v)} against {self.rows} rows")
        return tuple(
            sum(v[i] * self.entries[i * self.cols + j] for i in range(self.rows))
            for j in range(self.cols)
        )

    def times_column(self, v: Sequence[int]) -> tuple[int, ...]:
        """Matrix times column vector: ``self · v``."""
        if len(v) != self.cols:
            raise ShapeError(f"vector of length {len(v)} against {self.cols} columns")
        return tuple(
            _dot(self.row(i), v) for i in range(self.rows)
        )

    def select(
        self, rows: Sequence[int] | None = None, cols: Sequence[int] | None = None
    ) -> IntMatrix:
        """Submatrix on the given row and column indices (all when ``None``)."""
        rows = range(self.rows) if rows is None else rows
        cols = range(self.cols) if cols is None else cols
        return IntMatrix.from_rows(
            ([self[i, j] for j in cols] for i in rows), len(cols)
        )

    def stack(self, other: IntMatrix) -> IntMatrix:
        """Rows of ``self`` followed by rows of ``other``."""
        if self.cols != other.cols:
            raise ShapeError(f"cannot stack {self.cols} and {other.cols} columns")
        return IntMatrix(
            self.rows + other.rows, self.cols, self.entries + other.entries
        )

    def to_domain(self, domain=ZZ) -> DomainMatrix:
        return DomainMatrix(
            [[domain(x) for x in self.row(i)] for i in range(self.rows)],
            (self.rows, self.cols),
            domain,
        )

    def determinant(self) -> int:
        if not self.is_square():
            raise ShapeError(f"determinant of a {self.rows}x{self.cols} matrix")
        if self.rows == 0:
            return 1
        return int(self.to_domain().det())

    def rational_rank(self) -> int:
        if self.rows == 0 or self.cols == 0:
            return 0
        return int(self.to_domain(QQ).rank())

    def is_unimodular(self) -> bool:
        return self.is_square() and abs(self.determinant()) == 1

    def unimodular_inverse(self) -> IntMatrix:
        """Integer inverse of a unimodular matrix."""
        if not self.is_unimodular():
            raise InputError("matrix is not unimodular")
        if self.rows == 0:
            return self
        inverse = self.to_domain(QQ).inv()
        rows = [[int(x) for x in row] for row in inverse.to_Matrix().tolist()]
        return IntMatrix.from_rows(rows, self.cols)

    def __str__(self) -> str:
        return str(self.to_rows())


@dataclass(frozen=True)
class SmithDecomposition:
    """``U · source · V = D`` with ``U``, ``V`` unimodular and ``D`` diagonal."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    source: IntMatrix

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.D[i, i] for i in range(min(self.D.rows, self.D.cols)))


@dataclass(frozen=True)
class Lattice:
    """A subgroup of Zⁿ held by its canonical Hermite basis.

    Any spanning set may be passed as ``basis``; it is replaced by the
    nonzero rows of its Hermite normal form.
    """

    ambient_dim: int
    basis: IntMatrix

    def __post_init__(self) -> None:
        if self.basis.cols != self.ambient_dim:
            raise ShapeError(
                f"basis has {self.basis.cols} columns in ambient dimension "
                f"{self.ambient_dim}"
            )
        H, _ = hermite_normal_form(self.basis)
        nonzero = [H.row(i) for i in range(H.rows) if any(H.row(i))]
        object.__setattr__(
            self, "basis", IntMatrix.from_rows(nonzero, self.ambient_dim)
        )

    @classmethod
    def zero(cls, n: int) -> Lattice:
        return cls(n, IntMatrix.zeros(0, n))

    @classmethod
    def full(cls, n: int) -> Lattice:
        return cls(n, IntMatrix.identity(n))

    @property
    def rank(self) -> int:
        return self.basis.rows

    def is_full_rank(self) -> bool:
        return self.rank == self.ambient_dim

    def index(self) -> int | None:
        """Index of the lattice in Zⁿ, or ``None`` when it is infinite."""
        if not self.is_full_rank():
            return None
        index = 1
        for i in range(self.rank):
            index *= self.basis[i, i]
        return index

    def coordinates(self, v: Sequence[int]) -> tuple[int, ...] | None:
        """Integer coordinates of ``v`` in the canonical basis, or ``None``."""
        if len(v) != self.ambient_dim:
            raise DimensionMismatchError(self.ambient_dim, len(v), "vector length")
        residual = list(v)
        coords = []
        for i, p in enumerate(_pivot_columns(self.basis)):
            row = self.basis.row(i)
            if any(residual[j] for j in range(p)):
                return None
            c, rem = divmod(residual[p], row[p])
            if rem:
                return None
            coords.append(c)
            if c:
                residual = [a - c * b for a, b in zip(residual, row, strict=True)]
        if any(residual):
            return None
        return tuple(coords)

    def __contains__(self, v: Sequence[int]) -> bool:
        return self.coordinates(v) is not None

    def to_rows(self) -> list[list[int]]:
        return self.basis.to_rows()


# -- Elementary operations ----------------------------------------------------


def _row_combine(
    mat: list[list[int]], i: int, j: int, a: int, b: int, c: int, d: int
) -> None:
    """Replace rows (i, j) by (a·ri + b·rj, c·ri + d·rj)."""
    ri, rj = mat[i], mat[j]
    mat[i] = [a * x + b * y for x, y in zip(ri, rj, strict=True)]
    mat[j] = [c * x + d * y for x, y in zip(ri, rj, strict=True)]


def _col_combine(
    mat: list[list[int]], i: int, j: int, a: int, b: int, c: int, d: int
) -> None:
    """Replace columns (i, j) by (a·ci + b·cj, c·ci + d·cj)."""
    for row in mat:
        x, y = row[i], row[j]
        row[i] = a * x + b * y
        row[j] = c * x + d * y


def _gcd_step(a: int, b: int) -> tuple[int, int, int, int]:
    """A determinant-one 2x2 matrix sending ``(a, b)`` to ``(gcd, 0)``.

    Keeps ``a`` untouched when it already divides ``b``.
    """
    if a != 0 and b % a == 0:
        return 1, 0, -(b // a), 1
    x, y, g = igcdex(a, b)
    x, y, g = int(x), int(y), int(g)
    return x, y, -b // g, a // g


def _pivot_columns(mat: IntMatrix) -> list[int]:
    pivots = []
    for i in range(mat.rows):
        row = mat.row(i)
        pivots.append(next(j for j, x in enumerate(row) if x))
    return pivots


# -- Normal forms ---------------------------------------------------------------


def hermite_normal_form(A: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Row-style Hermite normal form ``H = U · A`` with ``U`` unimodular.

    Pivots are positive, entries above a pivot lie in ``[0, pivot)`` and zero
    rows sit at the bottom.
    """
    H = A.to_rows()
    U = IntMatrix.identity(A.rows).to_rows()
    row = 0
    for col in range(A.cols):
        if row == A.rows:
            break
        for i in range(row + 1, A.rows):
            if H[i][col] == 0:
                continue
            if H[row][col] == 0:
                H[row], H[i] = H[i], H[row]
                U[row], U[i] = U[i], U[row]
                continue
            step = _gcd_step(H[row][col], H[i][col])
            _row_combine(H, row, i, *step)
            _row_combine(U, row, i, *step)
        pivot = H[row][col]
        if pivot == 0:
            continue
        if pivot < 0:
            H[row] = [-x for x in H[row]]
            U[row] = [-x for x in U[row]]
            pivot = -pivot
        for i in range(row):
            q = H[i][col] // pivot
            if q:
                H[i] = [x - q * y for x, y in zip(H[i], H[row], strict=True)]
                U[i] = [x - q * y for x, y in zip(U[i], U[row], strict=True)]
        row += 1
    return IntMatrix.from_rows(H, A.cols), IntMatrix.from_rows(U, A.rows)


def smith_normal_form(A: IntMatrix) -> SmithDecomposition:
    """Smith normal form with transforms: ``U · A · V = D``.

    Diagonal entries are nonnegative, form a divisibility chain and any zero
    entries (free directions) come last.
    """
    D = A.to_rows()
    U = IntMatrix.identity(A.rows).to_rows()
    V = IntMatrix.identity(A.cols).to_rows()
    rows, cols = A.rows, A.cols

    for t in range(min(rows, cols)):
        # Smallest nonzero entry of the trailing block becomes the pivot.
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if not D[i][j]:
                    continue
                if best is None or abs(D[i][j]) < abs(D[best[0]][best[1]]):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        D[t], D[i] = D[i], D[t]
        U[t], U[i] = U[i], U[t]
        _col_combine(D, t, j, 0, 1, 1, 0)
        _col_combine(V, t, j, 0, 1, 1, 0)

        while True:
            for i in range(t + 1, rows):
                if D[i][t]:
                    step = _gcd_step(D[t][t], D[i][t])
                    _row_combine(D, t, i, *step)
                    _row_combine(U, t, i, *step)
            for j in range(t + 1, cols):
                if D[t][j]:
                    a, b, c, d = _gcd_step(D[t][t], D[t][j])
                    _col_combine(D, t, j, a, b, c, d)
                    _col_combine(V, t, j, a, b, c, d)
            if any(D[i][t] for i in range(t + 1, rows)):
                continue
            pivot = D[t][t]
            offender = next(
                (
                    i
                    for i in range(t + 1, rows)
                    for j in range(t + 1, cols)
                    if D[i][j] % pivot
                ),
                None,
            )
            if offender is None:
                break
            # Pull a non-multiple into the pivot row; the next sweep shrinks the pivot.
            D[t] = [x + y for x, y in zip(D[t], D[offender], strict=True)]
            U[t] = [x + y for x, y in zip(U[t], U[offender], strict=True)]

        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]

    decomposition = SmithDecomposition(
        U=IntMatrix.from_rows(U, rows),
        D=IntMatrix.from_rows(D, cols),
        V=IntMatrix.from_rows(V, cols),
        source=A,
    )
    logger.debug("SNF of %dx%d matrix: %s", rows, cols, decomposition.diagonal)
    return decomposition


# -- Lattices -----------------------------------------------------------------


def lattice_from_rows(rows: Iterable[Sequence[int]], n: int) -> Lattice:
    """Canonical lattice spanned by the given integer vectors in Zⁿ."""
    return Lattice(n, IntMatrix.from_rows(rows, n))


def lattice_from_matrix(A: IntMatrix) -> Lattice:
    return lattice_from_rows(A.to_rows(), A.cols)


def left_kernel(A: IntMatrix) -> IntMatrix:
    """Basis (as rows) of ``{x ∈ Z^rows : x · A = 0}``."""
    H, U = hermite_normal_form(A)
    return IntMatrix.from_rows(
        (U.row(i) for i in range(H.rows) if not any(H.row(i))), A.rows
    )


def integer_kernel(A: IntMatrix) -> IntMatrix:
    """Basis (as rows) of ``{u ∈ Z^cols : A · u = 0}``."""
    return left_kernel(A.transpose())


def _check_same_ambient(L1: Lattice, L2: Lattice) -> None:
    if L1.ambient_dim != L2.ambient_dim:
        raise DimensionMismatchError(
            L1.ambient_dim, L2.ambient_dim, "ambient dimension"
        )


def lattice_contains(L1: Lattice, L2: Lattice) -> bool:
    """True iff ``L2 ⊆ L1``."""
    _check_same_ambient(L1, L2)
    return all(L2.basis.row(i) in L1 for i in range(L2.rank))


def lattice_equal(L1: Lattice, L2: Lattice) -> bool:
    _check_same_ambient(L1, L2)
    return L1.basis == L2.basis


def lattice_intersection(L1: Lattice, L2: Lattice) -> Lattice:
    _check_same_ambient(L1, L2)
    n = L1.ambient_dim
    if L1.rank == 0 or L2.rank == 0:
        return Lattice.zero(n)
    relations = left_kernel(L1.basis.stack(L2.basis))
    head = relations.select(cols=range(L1.rank))
    return lattice_from_matrix(head @ L1.basis) if head.rows else Lattice.zero(n)


def relative_coordinates(outer: Lattice, inner: Lattice) -> IntMatrix:
    """Rows of ``inner``'s basis written in ``outer``'s canonical basis."""
    _check_same_ambient(outer, inner)
    rows = []
    for i in range(inner.rank):
        coords = outer.coordinates(inner.basis.row(i))
        if coords is None:
            raise ContainmentError(
                f"vector {list(inner.basis.row(i))} is not in the outer lattice"
            )
        rows.append(coords)
    return IntMatrix.from_rows(rows, outer.rank)


def congruence_kernel(A: IntMatrix, moduli: Sequence[int]) -> Lattice:
    """``{u ∈ Zⁿ : a_j · u ≡ 0 (mod m_j)}`` for the rows ``a_j`` of ``A``."""
    if len(moduli) != A.rows:
        raise ShapeError(f"{len(moduli)} moduli for {A.rows} congruences")
    if any(m < 1 for m in moduli):
        raise InputError(f"moduli must be positive, got {list(moduli)}")
    n = A.cols
    if A.rows == 0 or all(m == 1 for m in moduli):
        return Lattice.full(n)
    # u solves the system iff (u, w) lies in the kernel of [A | -diag(m)].
    augmented = IntMatrix.from_rows(
        (
            list(A.row(j)) + [-m if i == j else 0 for i in range(A.rows)]
            for j, m in enumerate(moduli)
        ),
        n + A.rows,
    )
    kernel = integer_kernel(augmented)
    return lattice_from_rows((kernel.row(i)[:n] for i in range(kernel.rows)), n)


# -- Rational row spaces --------------------------------------------------------


class RationalRowSpace:
    """Reduced echelon basis of a rational row space, for fast membership."""

    def __init__(self, A: IntMatrix) -> None:
        self.dim = A.cols
        self.pivots: list[int] = []
        self.rows: list[list[Fraction]] = []
        if A.rows and A.cols:
            rref, pivots = A.to_domain(QQ).rref()
            matrix = rref.to_Matrix()
            for i, p in enumerate(pivots):
                self.pivots.append(p)
                self.rows.append(
                    [Fraction(int(x.p), int(x.q)) for x in matrix.row(i)]
                )

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def contains(self, v: Sequence[int]) -> bool:
        residual = [Fraction(x) for x in v]
        for p, row in zip(self.pivots, self.rows, strict=True):
            c = residual[p]
            if c:
                residual = [a - c * b for a, b in zip(residual, row, strict=True)]
        return not any(residual)

    def contains_all(self, A: IntMatrix) -> bool:
        return all(self.contains(A.row(i)) for i in range(A.rows))


def row_space_equal_q(A: IntMatrix, B: IntMatrix) -> bool:
    """Equality of the rational row spaces of ``A`` and ``B``."""
    if A.cols != B.cols:
        raise ShapeError(f"row spaces in Q^{A.cols} and Q^{B.cols}")
    space = RationalRowSpace(A)
    return space.rank == B.rational_rank() and space.contains_all(B)
