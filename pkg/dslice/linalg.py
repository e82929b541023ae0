"""
Exact integer and rational linear algebra.

All arithmetic uses Python integers and fractions.Fraction; nothing in this
module (or anywhere in dslice) touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .errors import DimensionMismatchError, SingularMatrixError

RatMatrix = Tuple[Tuple[Fraction, ...], ...]


@dataclass(frozen=True)
class IntMatrix:
    """Immutable rectangular matrix of arbitrary-precision integers."""

    rows: int
    cols: int
    entries: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(row) != self.cols for row in self.entries):
            raise DimensionMismatchError(f"entries do not form a {self.rows}x{self.cols} matrix")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        data = tuple(tuple(int(x) for x in row) for row in rows)
        if cols is None:
            cols = len(data[0]) if data else 0
        return cls(len(data), cols, data)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, index: Tuple[int, int]) -> int:
        i, j = index
        return self.entries[i][j]

    def to_lists(self) -> List[List[int]]:
        return [list(row) for row in self.entries]

    def column(self, j: int) -> Tuple[int, ...]:
        return tuple(row[j] for row in self.entries)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows, tuple(zip(*self.entries)) if self.rows else tuple(() for _ in range(self.cols)))

    def _check_same_shape(self, other: "IntMatrix") -> None:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatchError(f"shape {self.rows}x{self.cols} vs {other.rows}x{other.cols}")

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        self._check_same_shape(other)
        return IntMatrix(
            self.rows, self.cols, tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries))
        )

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + (-other)

    def __neg__(self) -> "IntMatrix":
        return self.scale(-1)

    def scale(self, k: int) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(tuple(k * a for a in row) for row in self.entries))

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise DimensionMismatchError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        other_cols = [other.column(j) for j in range(other.cols)]
        return IntMatrix(
            self.rows,
            other.cols,
            tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in other_cols) for row in self.entries),
        )

    def apply(self, vector: Sequence[int]) -> Tuple[int, ...]:
        """Matrix-vector product M·v."""
        if len(vector) != self.cols:
            raise DimensionMismatchError(f"vector of length {len(vector)} for {self.rows}x{self.cols} matrix")
        return tuple(sum(a * b for a, b in zip(row, vector)) for row in self.entries)

    def power(self, exponent: int) -> "IntMatrix":
        result = IntMatrix.identity(self.rows)
        for _ in range(exponent):
            result = result @ self
        return result


def block_diag(*blocks: IntMatrix) -> IntMatrix:
    """Block-diagonal matrix; the 0x0 matrix is the neutral element."""
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    data = []
    col_offset = 0
    for block in blocks:
        for row in block.entries:
            data.append((0,) * col_offset + row + (0,) * (cols - col_offset - block.cols))
        col_offset += block.cols
    return IntMatrix(rows, cols, tuple(data))


def kron(small: IntMatrix, block: IntMatrix) -> IntMatrix:
    """Kronecker product small ⊗ block (block-matrix with blocks small[i,j]·block)."""
    data = []
    for i in range(small.rows):
        for r in range(block.rows):
            data.append(tuple(small[i, j] * block[r, c] for j in range(small.cols) for c in range(block.cols)))
    return IntMatrix(small.rows * block.rows, small.cols * block.cols, tuple(data))


@dataclass(frozen=True)
class SnfResult:
    """
    Smith normal form U·M·W = D.

    U and W are unimodular; their inverses are tracked alongside so callers
    can move between presentation and Smith coordinates without inverting.
    """

    U: IntMatrix
    D: IntMatrix
    W: IntMatrix
    U_inv: IntMatrix
    W_inv: IntMatrix

    @property
    def diagonal(self) -> Tuple[int, ...]:
        return tuple(self.D[i, i] for i in range(min(self.D.rows, self.D.cols)))


def _find_pivot(a: List[List[int]], s: int) -> Optional[Tuple[int, int]]:
    """Smallest nonzero |entry| in a[s:, s:]; leftmost column, then topmost row, wins ties."""
    best = None
    position = None
    cols = len(a[0]) if a else 0
    for c in range(s, cols):
        for r in range(s, len(a)):
            value = abs(a[r][c])
            if value and (best is None or value < best):
                best = value
                position = (r, c)
    return position


class _SnfWorkspace:
    """Mutable working copy of M with the unimodular transforms and their inverses."""

    def __init__(self, matrix: IntMatrix):
        self.m, self.n = matrix.rows, matrix.cols
        self.a = matrix.to_lists()
        self.u = IntMatrix.identity(self.m).to_lists()
        self.u_inv = IntMatrix.identity(self.m).to_lists()
        self.w = IntMatrix.identity(self.n).to_lists()
        self.w_inv = IntMatrix.identity(self.n).to_lists()

    def swap_rows(self, i: int, j: int) -> None:
        if i == j:
            return
        self.a[i], self.a[j] = self.a[j], self.a[i]
        self.u[i], self.u[j] = self.u[j], self.u[i]
        for row in self.u_inv:
            row[i], row[j] = row[j], row[i]

    def swap_cols(self, i: int, j: int) -> None:
        if i == j:
            return
        for row in self.a:
            row[i], row[j] = row[j], row[i]
        for row in self.w:
            row[i], row[j] = row[j], row[i]
        self.w_inv[i], self.w_inv[j] = self.w_inv[j], self.w_inv[i]

    def add_row(self, target: int, source: int, k: int) -> None:
        """row[target] += k * row[source]"""
        self.a[target] = [x + k * y for x, y in zip(self.a[target], self.a[source])]
        self.u[target] = [x + k * y for x, y in zip(self.u[target], self.u[source])]
        for row in self.u_inv:
            row[source] -= k * row[target]

    def add_col(self, target: int, source: int, k: int) -> None:
        """col[target] += k * col[source]"""
        for row in self.a:
            row[target] += k * row[source]
        for row in self.w:
            row[target] += k * row[source]
        self.w_inv[source] = [x - k * y for x, y in zip(self.w_inv[source], self.w_inv[target])]

    def negate_row(self, i: int) -> None:
        self.a[i] = [-x for x in self.a[i]]
        self.u[i] = [-x for x in self.u[i]]
        for row in self.u_inv:
            row[i] = -row[i]

    def result(self) -> SnfResult:
        return SnfResult(
            U=IntMatrix.from_rows(self.u, self.m),
            D=IntMatrix.from_rows(self.a, self.n),
            W=IntMatrix.from_rows(self.w, self.n),
            U_inv=IntMatrix.from_rows(self.u_inv, self.m),
            W_inv=IntMatrix.from_rows(self.w_inv, self.n),
        )


def smith_normal_form(matrix: IntMatrix) -> SnfResult:
    """
    Smith normal form by pivoted row/column reduction.

    The pivot is always the smallest nonzero absolute value in the remaining
    submatrix, so U and W are deterministic for a fixed input. Diagonal
    entries satisfy d1 | d2 | ... and are non-negative.
    """
    ws = _SnfWorkspace(matrix)
    a = ws.a
    s = 0
    while s < min(ws.m, ws.n):
        pivot = _find_pivot(a, s)
        if pivot is None:
            break
        ws.swap_rows(s, pivot[0])
        ws.swap_cols(s, pivot[1])

        while True:
            for r in range(s + 1, ws.m):
                if a[r][s]:
                    ws.add_row(r, s, -(a[r][s] // a[s][s]))
            for c in range(s + 1, ws.n):
                if a[s][c]:
                    ws.add_col(c, s, -(a[s][c] // a[s][s]))

            if any(a[r][s] for r in range(s + 1, ws.m)) or any(a[s][c] for c in range(s + 1, ws.n)):
                pivot = _find_pivot(a, s)
                ws.swap_rows(s, pivot[0])
                ws.swap_cols(s, pivot[1])
                continue

            offender = next(
                (r for r in range(s + 1, ws.m) for c in range(s + 1, ws.n) if a[r][c] % a[s][s]),
                None,
            )
            if offender is None:
                break
            ws.add_row(s, offender, 1)

        if a[s][s] < 0:
            ws.negate_row(s)
        s += 1

    return ws.result()


def det(matrix: IntMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    if not matrix.is_square:
        raise DimensionMismatchError(f"determinant of non-square {matrix.rows}x{matrix.cols} matrix")
    n = matrix.rows
    if n == 0:
        return 1
    a = matrix.to_lists()
    sign = 1
    previous = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // previous
        previous = a[k][k]
    return sign * a[n - 1][n - 1]


def rational_inverse(matrix: IntMatrix) -> RatMatrix:
    """Exact inverse over the rationals by Gauss-Jordan elimination."""
    if not matrix.is_square:
        raise DimensionMismatchError(f"inverse of non-square {matrix.rows}x{matrix.cols} matrix")
    n = matrix.rows
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(matrix.entries)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise SingularMatrixError("matrix has determinant 0")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv_pivot = 1 / aug[col][col]
        aug[col] = [x * inv_pivot for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [x - factor * y for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


def solve_integer(matrix: IntMatrix, rhs: Sequence[int]) -> Optional[Tuple[int, ...]]:
    """
    Integer solution x of M·x = b, or None when none exists.

    Solvability is decided in Smith coordinates: with U·M·W = D the system
    becomes D·y = U·b, and x = W·y.
    """
    if len(rhs) != matrix.rows:
        raise DimensionMismatchError(f"right-hand side of length {len(rhs)} for {matrix.rows} rows")
    snf = smith_normal_form(matrix)
    c = snf.U.apply(rhs)
    diagonal = snf.diagonal
    y = [0] * matrix.cols
    for i, value in enumerate(c):
        d = diagonal[i] if i < len(diagonal) else 0
        if d == 0:
            if value != 0:
                return None
        elif value % d:
            return None
        else:
            y[i] = value // d
    return snf.W.apply(y)


def hermite_normal_form(rows: Sequence[Sequence[int]], cols: int) -> Tuple[Tuple[int, ...], ...]:
    """
    Row-style Hermite normal form of the lattice spanned by ``rows``.

    Returns the nonzero rows: echelon form, positive pivots, and entries above
    each pivot reduced into [0, pivot).
    """
    a = [list(row) for row in rows if any(row)]
    pivot_row = 0
    for col in range(cols):
        found = False
        while True:
            candidates = [r for r in range(pivot_row, len(a)) if a[r][col] != 0]
            if not candidates:
                break
            found = True
            best = min(candidates, key=lambda r: (abs(a[r][col]), r))
            a[pivot_row], a[best] = a[best], a[pivot_row]
            for r in range(pivot_row + 1, len(a)):
                if a[r][col]:
                    k = a[r][col] // a[pivot_row][col]
                    a[r] = [x - k * y for x, y in zip(a[r], a[pivot_row])]
            if not any(a[r][col] for r in range(pivot_row + 1, len(a))):
                break
        if not found:
            continue
        if a[pivot_row][col] < 0:
            a[pivot_row] = [-x for x in a[pivot_row]]
        pivot = a[pivot_row][col]
        for r in range(pivot_row):
            k = a[r][col] // pivot
            if k:
                a[r] = [x - k * y for x, y in zip(a[r], a[pivot_row])]
        pivot_row += 1
    return tuple(tuple(row) for row in a[:pivot_row])
