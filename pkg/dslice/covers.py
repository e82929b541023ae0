"""
Branched cyclic covers: H_1 of the q-fold branched cover with its linking
form and deck transformation, computed from a Seifert matrix.

The presentation matrix on q-1 blocks of coordinates is

    L_q = (I + S) (x) V + (I + S^T) (x) V^T

with S the lower shift, so diagonal blocks are V + V^T, subdiagonal blocks V
and superdiagonal blocks V^T. The deck transformation acts on block
coordinates by M (x) I with M = -(I + S^T)(I + S)^-1; for q = 2 this is -I and
for q = 3 it sends block 1 to block 2 and block 2 to minus their sum.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import floor, prod
from typing import Iterator, Optional, Sequence, Tuple

from .config import get_settings
from .errors import ConsistencyError, DegenerateCoverError, MismatchedCoverError, NotPrimePowerError
from .knots import SeifertMatrix, TwoBridge
from .laurent import resultant_order
from .linalg import IntMatrix, block_diag, kron, smith_normal_form
from .logging_config import get_logger

logger = get_logger(__name__)

Element = Tuple[int, ...]


def is_prime_power(q: int) -> bool:
    if q < 2:
        return False
    p = next(d for d in range(2, q + 1) if q % d == 0)
    while q % p == 0:
        q //= p
    return q == 1


def prime_powers(upto: int, start: int = 2) -> Tuple[int, ...]:
    return tuple(q for q in range(max(start, 2), upto + 1) if is_prime_power(q))


def frac_mod1(x: Fraction) -> Fraction:
    return x - floor(x)


def _shift(n: int) -> IntMatrix:
    return IntMatrix.from_rows([[int(i == j + 1) for j in range(n)] for i in range(n)], n)


def deck_matrix(q: int) -> IntMatrix:
    """The (q-1)x(q-1) matrix M = -(I + S^T)(I + S)^-1."""
    n = q - 1
    # (I + S)^-1 is lower triangular with entries (-1)^(i-j)
    inverse = IntMatrix.from_rows([[(-1) ** (i - j) if i >= j else 0 for j in range(n)] for i in range(n)], n)
    upper = IntMatrix.identity(n) + _shift(n).transpose()
    return -(upper @ inverse)


def _check_deck_matrix(q: int, M: IntMatrix) -> None:
    n = q - 1
    identity = IntMatrix.identity(n)
    lower = identity + _shift(n)
    upper = lower.transpose()
    if M.power(q) != identity:
        raise ConsistencyError(f"deck matrix does not have order {q}")
    norm = IntMatrix.zeros(n, n)
    for j in range(q):
        norm = norm + M.power(j)
    if norm != IntMatrix.zeros(n, n):
        raise ConsistencyError("deck matrix is not norm-annihilating")
    if M @ lower @ M.transpose() != lower or M @ upper @ M.transpose() != upper:
        raise ConsistencyError("deck matrix does not preserve the presentation form")


@dataclass(frozen=True)
class CoverPresentation:
    q: int
    L: IntMatrix
    tau: IntMatrix
    expected_order: int

    @property
    def size(self) -> int:
        return self.L.rows


def check_prime_power(q: int) -> None:
    if not is_prime_power(q):
        raise NotPrimePowerError(f"cover degree must be a prime power, got {q}")


def build_presentation(V, q: int) -> CoverPresentation:
    """
    Presentation of H_1 of the q-fold branched cover for Seifert matrix V.

    ``V`` may be a SeifertMatrix or a bare IntMatrix; either way it is
    checked for validity.
    """
    check_prime_power(q)
    seifert = V if isinstance(V, SeifertMatrix) else SeifertMatrix(V)
    matrix = seifert.V
    n = q - 1
    lower = IntMatrix.identity(n) + _shift(n)
    L = kron(lower, matrix) + kron(lower.transpose(), matrix.transpose())
    M = deck_matrix(q)
    _check_deck_matrix(q, M)
    tau = kron(M, IntMatrix.identity(matrix.rows))

    if L != L.transpose():
        raise ConsistencyError("presentation matrix is not symmetric")
    order = resultant_order(seifert.alexander(), q)
    if order == 0:
        raise DegenerateCoverError(f"det(L_{q}) = 0; the cover is not a rational homology sphere")
    logger.debug(f"Built L_{q} of size {L.rows}, expected |H_1| = {order}")
    return CoverPresentation(q=q, L=L, tau=tau, expected_order=order)


@dataclass(frozen=True)
class LinkedGroup:
    """
    Finite abelian group Z/d_1 + ... + Z/d_k with linking form and deck action.

    Elements are integer tuples with 0 <= x_i < d_i. ``gram[i][j]`` is
    lambda(e_i, e_j) in [0, 1) and ``t_action`` sends x to t_action·x reduced
    coordinatewise. Factors form a divisibility chain when computed from a
    presentation; direct sums keep the block coordinates of their summands.
    """

    q: int
    invariant_factors: Tuple[int, ...]
    gram: Tuple[Tuple[Fraction, ...], ...]
    t_action: Tuple[Tuple[int, ...], ...]

    @classmethod
    def trivial(cls, q: int) -> "LinkedGroup":
        return cls(q, (), (), ())

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    @property
    def order(self) -> int:
        return prod(self.invariant_factors)

    @property
    def zero(self) -> Element:
        return (0,) * self.rank

    def describe(self) -> str:
        if not self.invariant_factors:
            return "0"
        return " + ".join(f"Z/{d}" for d in self.invariant_factors)

    def elements(self) -> Iterator[Element]:
        return product(*(range(d) for d in self.invariant_factors))

    def reduce(self, x: Sequence[int]) -> Element:
        return tuple(v % d for v, d in zip(x, self.invariant_factors))

    def contains(self, x: Sequence[int]) -> bool:
        return len(x) == self.rank and all(0 <= v < d for v, d in zip(x, self.invariant_factors))

    def add(self, x: Sequence[int], y: Sequence[int]) -> Element:
        return self.reduce([a + b for a, b in zip(x, y)])

    def neg(self, x: Sequence[int]) -> Element:
        return self.reduce([-a for a in x])

    def pairing(self, x: Sequence[int], y: Sequence[int]) -> Fraction:
        total = Fraction(0)
        for i, xi in enumerate(x):
            if xi:
                row = self.gram[i]
                total += xi * sum((yj * row[j] for j, yj in enumerate(y) if yj), Fraction(0))
        return frac_mod1(total)

    def act(self, x: Sequence[int]) -> Element:
        return self.reduce([sum(a * b for a, b in zip(row, x)) for row in self.t_action])

    def negated(self) -> "LinkedGroup":
        """The same group with -lambda (the orientation-reversed cover)."""
        gram = tuple(tuple(frac_mod1(-v) for v in row) for row in self.gram)
        return LinkedGroup(self.q, self.invariant_factors, gram, self.t_action)

    def validate(self) -> None:
        """Check the linking-form and deck-action invariants, raising ConsistencyError."""
        k = self.rank
        d = self.invariant_factors
        if any(f < 2 for f in d):
            raise ConsistencyError(f"invariant factors must exceed 1, got {d}")
        for i in range(k):
            for j in range(k):
                if self.gram[i][j] != self.gram[j][i]:
                    raise ConsistencyError(f"linking form not symmetric at ({i}, {j})")
                if frac_mod1(self.gram[i][j] * d[i]) != 0:
                    raise ConsistencyError(f"linking form not well defined on generator {i}")
        if not is_nonsingular(self):
            raise ConsistencyError("linking form is singular")

        basis = [tuple(int(i == j) for j in range(k)) for i in range(k)]
        images = [self.act(e) for e in basis]
        for i in range(k):
            for j in range(k):
                if self.pairing(images[i], images[j]) != self.gram[i][j]:
                    raise ConsistencyError("deck action does not preserve the linking form")
        for e in basis:
            power = e
            norm = e
            for _ in range(self.q - 1):
                power = self.act(power)
                norm = self.add(norm, power)
            if self.act(power) != e:
                raise ConsistencyError(f"deck action does not have order dividing {self.q}")
            if norm != self.zero:
                raise ConsistencyError("1 + t + ... + t^(q-1) does not annihilate the group")


def is_nonsingular(H: LinkedGroup) -> bool:
    """
    The adjoint x -> lambda(x, -) is bijective iff [B; diag(d)] has only unit
    invariant factors, where B[i][j] = gram[i][j] * d_j.
    """
    k = H.rank
    if k == 0:
        return True
    d = H.invariant_factors
    rows = [[int(H.gram[i][j] * d[j]) for j in range(k)] for i in range(k)]
    rows.extend([d[i] if i == j else 0 for j in range(k)] for i in range(k))
    return all(x == 1 for x in smith_normal_form(IntMatrix.from_rows(rows, k)).diagonal)


def homology(pres: CoverPresentation, sign: Optional[int] = None) -> LinkedGroup:
    """
    Cokernel of L_q in Smith coordinates, with lambda = sign * L_q^-1 mod Z.

    With U L W = D, the generator for diagonal entry d_i is column i of U^-1,
    so lambda(g_i, g_j) = sign * (U^-T W)[i][j] / d_j; the deck action is
    U tau U^-1 restricted to the nontrivial coordinates.
    """
    if sign is None:
        sign = get_settings().sign
    snf = smith_normal_form(pres.L)
    diagonal = snf.diagonal
    if any(d == 0 for d in diagonal):
        raise DegenerateCoverError(f"L_{pres.q} is singular")
    keep = [i for i, d in enumerate(diagonal) if d > 1]
    factors = tuple(diagonal[i] for i in keep)
    if prod(factors) != pres.expected_order:
        raise ConsistencyError(
            f"|coker L_{pres.q}| = {prod(factors)} disagrees with the resultant order {pres.expected_order}"
        )

    n = pres.size
    U_inv, W, U = snf.U_inv, snf.W, snf.U
    gram = tuple(
        tuple(
            frac_mod1(Fraction(sign * sum(U_inv[r, i] * W[r, j] for r in range(n)), diagonal[j])) for j in keep
        )
        for i in keep
    )
    tau_u_inv = pres.tau @ U_inv
    t_action = tuple(
        tuple(sum(U[i, r] * tau_u_inv[r, j] for r in range(n)) % diagonal[i] for j in keep) for i in keep
    )

    group = LinkedGroup(q=pres.q, invariant_factors=factors, gram=gram, t_action=t_action)
    group.validate()
    logger.debug(f"H_1 = {group.describe()}")
    return group


def direct_sum(a: LinkedGroup, b: LinkedGroup) -> LinkedGroup:
    if a.q != b.q:
        raise MismatchedCoverError(f"cannot sum groups of covers q={a.q} and q={b.q}")
    ka, kb = a.rank, b.rank
    gram = tuple(row + (Fraction(0),) * kb for row in a.gram) + tuple((Fraction(0),) * ka + row for row in b.gram)
    t_action = block_diag(
        IntMatrix.from_rows(a.t_action, ka), IntMatrix.from_rows(b.t_action, kb)
    ).entries
    return LinkedGroup(a.q, a.invariant_factors + b.invariant_factors, gram, t_action)


def two_bridge_group(p: int, q: int, sign: Optional[int] = None) -> LinkedGroup:
    """H_1(L(p, q)) = Z/p with lambda(g, g) = -q/p under the default sign; t acts by -1."""
    if sign is None:
        sign = get_settings().sign
    if p == 1:
        return LinkedGroup.trivial(2)
    return LinkedGroup(2, (p,), ((frac_mod1(Fraction(sign * q, p)),),), ((p - 1,),))


def linked_group(knot, q: int, sign: Optional[int] = None) -> LinkedGroup:
    """H_1 with linking form for a Seifert-matrix or two-bridge descriptor."""
    if isinstance(knot, TwoBridge):
        check_prime_power(q)
        if q == 2:
            return two_bridge_group(knot.p, knot.q, sign)
        knot = knot.seifert()
    return homology(build_presentation(knot, q), sign)
