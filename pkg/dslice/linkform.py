"""
Subgroups, orthogonal complements and metabolizers of linked groups.

A subgroup P of H = Z/d_1 + ... + Z/d_k is stored as the lattice of integer
vectors reducing into P. That lattice contains diag(d) Z^k, and its
upper-triangular Hermite basis is a canonical key for P.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import gcd, isqrt, lcm, prod
from typing import Iterator, List, Optional, Sequence, Tuple

from .config import resolve_cap
from .covers import Element, LinkedGroup
from .errors import GroupTooLargeError
from .linalg import IntMatrix, hermite_normal_form, smith_normal_form
from .logging_config import get_logger

logger = get_logger(__name__)

Basis = Tuple[Tuple[int, ...], ...]


def _in_span(rows: Sequence[Sequence[int]], start: int, x: Sequence[int]) -> bool:
    """Whether x lies in the span of upper-triangular rows whose pivots sit at columns start, start+1, ..."""
    residual = list(x)
    for offset, row in enumerate(rows):
        col = start + offset
        pivot = row[col]
        if residual[col] % pivot:
            return False
        c = residual[col] // pivot
        if c:
            residual = [r - c * v for r, v in zip(residual, row)]
    return not any(residual)


@dataclass(frozen=True)
class Subgroup:
    """Subgroup of a group with the given invariant factors, keyed by its Hermite basis."""

    factors: Tuple[int, ...]
    basis: Basis

    @classmethod
    def generated_by(cls, generators: Sequence[Sequence[int]], factors: Sequence[int]) -> "Subgroup":
        factors = tuple(factors)
        k = len(factors)
        rows = [list(g) for g in generators]
        rows.extend([d if i == j else 0 for j in range(k)] for i, d in enumerate(factors))
        return cls(factors, hermite_normal_form(rows, k))

    @classmethod
    def trivial(cls, factors: Sequence[int]) -> "Subgroup":
        return cls.generated_by([], factors)

    @property
    def order(self) -> int:
        return prod(self.factors) // prod(self.basis[i][i] for i in range(len(self.factors)))

    @property
    def generators(self) -> Tuple[Element, ...]:
        """Basis rows reduced into the group, zero elements dropped."""
        reduced = (tuple(v % d for v, d in zip(row, self.factors)) for row in self.basis)
        return tuple(g for g in reduced if any(g))

    def contains(self, x: Sequence[int]) -> bool:
        return _in_span(self.basis, 0, x)

    def elements(self) -> Tuple[Element, ...]:
        k = len(self.factors)
        ranges = [range(self.factors[i] // self.basis[i][i]) for i in range(k)]
        out = set()
        for coeffs in product(*ranges):
            vector = [0] * k
            for c, row in zip(coeffs, self.basis):
                if c:
                    vector = [v + c * r for v, r in zip(vector, row)]
            out.add(tuple(v % d for v, d in zip(vector, self.factors)))
        return tuple(sorted(out))

    def sort_key(self) -> Tuple[int, Basis]:
        return (self.order, self.basis)


@dataclass(frozen=True)
class MetabolizerPair:
    g1: Subgroup
    g2: Subgroup


def check_cap(H: LinkedGroup, cap: Optional[int]) -> None:
    cap = resolve_cap(cap)
    if H.order > cap:
        raise GroupTooLargeError(f"|H| = {H.order} exceeds the enumeration cap {cap}")


def _lattices(factors: Tuple[int, ...], order: Optional[int]) -> Iterator[Basis]:
    """
    All Hermite bases of lattices between diag(d) Z^k and Z^k, built bottom row first.

    Row i is (0, .., 0, a_i, b_i,i+1, .., b_i,k-1) with a_i | d_i and
    0 <= b_ij < a_j; the lattice contains d_i e_i exactly when
    (d_i / a_i) * (b_i,i+1, ..) lies in the span of the rows below.
    """
    k = len(factors)

    def extend(i: int, rows: List[Tuple[int, ...]], index: int) -> Iterator[Basis]:
        if i < 0:
            if order is None or index == order:
                yield tuple(rows)
            return
        d = factors[i]
        below = [r[i + 1 :] for r in rows]
        pivots = [below[j][j] for j in range(len(below))]
        for a in (x for x in range(1, d + 1) if d % x == 0):
            sub_index = index * (d // a)
            if order is not None and order % sub_index:
                continue
            for tail in product(*(range(p) for p in pivots)):
                if not _in_span(below, 0, [(d // a) * b for b in tail]):
                    continue
                row = (0,) * i + (a,) + tuple(tail)
                yield from extend(i - 1, [row] + rows, sub_index)

    yield from extend(k - 1, [], 1)


def subgroups(H: LinkedGroup, cap: Optional[int] = None, order: Optional[int] = None) -> List[Subgroup]:
    """Every subgroup of H exactly once (optionally only those of a given order), sorted by (order, basis)."""
    check_cap(H, cap)
    found = [Subgroup(H.invariant_factors, basis) for basis in _lattices(H.invariant_factors, order)]
    found.sort(key=Subgroup.sort_key)
    logger.debug(f"Enumerated {len(found)} subgroups of {H.describe()}" + (f" of order {order}" if order else ""))
    return found


def orthogonal_complement(H: LinkedGroup, P: Subgroup) -> Subgroup:
    """
    P^perp = {y : lambda(g, y) = 0 for all g in P}.

    With N the exponent of H the conditions form an integer system A y = 0
    mod N; in Smith coordinates U A W = D it decouples into
    d_i z_i = 0 mod N, so y ranges over W * diag(N / gcd(N, d_i)) Z^k.
    """
    k = H.rank
    if k == 0:
        return Subgroup.trivial(())
    N = lcm(*H.invariant_factors)
    rows = []
    for g in P.basis:
        rows.append([int(sum(g[i] * H.gram[i][j] for i in range(k)) * N) % N for j in range(k)])
    snf = smith_normal_form(IntMatrix.from_rows(rows, k))
    diagonal = snf.diagonal
    steps = [N // gcd(N, diagonal[i]) if i < len(diagonal) else 1 for i in range(k)]
    generators = [[snf.W[r, i] * steps[i] for r in range(k)] for i in range(k)]
    return Subgroup.generated_by(generators, H.invariant_factors)


def is_isotropic(H: LinkedGroup, P: Subgroup) -> bool:
    gens = P.generators
    return all(H.pairing(x, y) == 0 for i, x in enumerate(gens) for y in gens[i:])


def is_metabolizer(H: LinkedGroup, P: Subgroup, definitional: bool = False) -> bool:
    """
    P = P^perp. The default route checks isotropy and |P|^2 = |H|, which is
    equivalent for nonsingular forms; ``definitional`` computes P^perp.
    """
    if definitional:
        return orthogonal_complement(H, P) == P
    return P.order * P.order == H.order and is_isotropic(H, P)


def is_t_invariant(H: LinkedGroup, P: Subgroup) -> bool:
    return all(P.contains(H.act(g)) for g in P.generators)


def metabolizers(H: LinkedGroup, lambda_invariant: bool = False, cap: Optional[int] = None) -> List[Subgroup]:
    check_cap(H, cap)
    root = isqrt(H.order)
    if root * root != H.order:
        return []
    found = [P for P in subgroups(H, cap, order=root) if is_isotropic(H, P)]
    if lambda_invariant:
        found = [P for P in found if is_t_invariant(H, P)]
    logger.debug(f"{len(found)} {'Lambda-' if lambda_invariant else ''}metabolizers in {H.describe()}")
    return found


def spans(H: LinkedGroup, a: Subgroup, b: Subgroup) -> bool:
    return Subgroup.generated_by(a.basis + b.basis, H.invariant_factors).order == H.order


def metabolizer_pairs(
    H: LinkedGroup, lambda_invariant: bool = False, cap: Optional[int] = None
) -> List[MetabolizerPair]:
    """Unordered pairs of metabolizers with H = G1 + G2; (0, 0) only for the trivial group."""
    mets = metabolizers(H, lambda_invariant, cap)
    pairs = []
    for i, g1 in enumerate(mets):
        for g2 in mets[i:]:
            if g1 == g2 and H.order != 1:
                continue
            if spans(H, g1, g2):
                pairs.append(MetabolizerPair(g1, g2))
    return pairs
