"""
Knot descriptors and the expressions that combine them.

A leaf is a Seifert matrix, a two-bridge knot, or a FactRecord whose
invariants were computed elsewhere. Leaves combine into KnotExpr trees by
connected sum (with integer multiplicities) and mirroring.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from .errors import (
    BadFractionError,
    InvalidAlexanderError,
    InvalidExpressionError,
    MalformedRecordError,
    NotEnoughSummandsError,
)
from .laurent import BezoutCertificate, LaurentPoly, alexander_from_seifert, check_seifert, gcd_bezout, normalize
from .linalg import IntMatrix, block_diag
from .logging_config import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class SeifertMatrix:
    """Square integer matrix V with V - V^T unimodular."""

    V: IntMatrix
    name: Optional[str] = None

    def __post_init__(self):
        check_seifert(self.V)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], name: Optional[str] = None) -> "SeifertMatrix":
        size = len(rows)
        return cls(IntMatrix.from_rows(rows, size), name)

    @property
    def genus(self) -> int:
        return self.V.rows // 2

    def alexander(self) -> LaurentPoly:
        return alexander_from_seifert(self.V)


def connected_sum(a: SeifertMatrix, b: SeifertMatrix) -> SeifertMatrix:
    name = f"{a.name}#{b.name}" if a.name and b.name else None
    return SeifertMatrix(block_diag(a.V, b.V), name)


def mirror(a: SeifertMatrix) -> SeifertMatrix:
    """-V^T; reverses orientation of the ambient sphere and the knot together."""
    return SeifertMatrix(-a.V.transpose(), f"-{a.name}" if a.name else None)


def even_continued_fraction(p: int, r: int) -> Tuple[int, ...]:
    """
    Entries a_i, all even, with p/r = a_1 - 1/(a_2 - 1/(... - 1/a_k)).

    Requires p odd and r even; the expansion then exists, is unique and has
    even length.
    """
    x = Fraction(p, r)
    entries = []
    while True:
        a = 2 * round(x / 2)
        entries.append(a)
        if a == x:
            return tuple(entries)
        x = 1 / (a - x)


def two_bridge_seifert(p: int, q: int) -> IntMatrix:
    """Seifert matrix of the two-bridge knot with fraction p/q, read off the even continued fraction."""
    r = q if q % 2 == 0 else q - p
    entries = even_continued_fraction(p, r)
    k = len(entries)
    rows = [[0] * k for _ in range(k)]
    for i, a in enumerate(entries):
        rows[i][i] = a // 2
        if i + 1 < k:
            rows[i][i + 1] = 1
    return IntMatrix.from_rows(rows, k)


@dataclass(frozen=True)
class TwoBridge:
    """Two-bridge knot with fraction p/q; its double branched cover is L(p, q)."""

    p: int
    q: int
    name: Optional[str] = None

    def __post_init__(self):
        if self.p < 1 or self.p % 2 == 0:
            raise BadFractionError(f"two-bridge p must be odd and positive, got {self.p}")
        if self.p == 1:
            if self.q != 0:
                raise BadFractionError("the unknot is TwoBridge(1, 0)")
            return
        if not 0 < self.q < self.p or gcd(self.p, self.q) != 1:
            raise BadFractionError(f"two-bridge fraction needs 0 < q < p coprime, got {self.p}/{self.q}")

    def seifert(self) -> SeifertMatrix:
        if self.p == 1:
            return SeifertMatrix(IntMatrix.zeros(0, 0), self.name)
        return SeifertMatrix(two_bridge_seifert(self.p, self.q), self.name)

    def alexander(self) -> LaurentPoly:
        return self.seifert().alexander()

    def mirrored(self) -> "TwoBridge":
        if self.p == 1:
            return self
        return TwoBridge(self.p, self.p - self.q, f"-{self.name}" if self.name else None)


@dataclass(frozen=True)
class CoverFact:
    """A declared statement about one branched cover, imported from the literature."""

    q: int
    invariant_factors: Tuple[int, ...]
    doubly_vanishing: bool
    provenance: str


@dataclass(frozen=True)
class FactRecord:
    name: str
    alexander: LaurentPoly
    facts: Tuple[CoverFact, ...] = ()

    def __post_init__(self):
        if self.alexander.is_zero or abs(self.alexander.evaluate(1)) != 1:
            raise InvalidAlexanderError(f"{self.name}: declared Alexander polynomial must satisfy Delta(1) = +-1")
        for fact in self.facts:
            if not fact.provenance or not fact.provenance.strip():
                raise MalformedRecordError(f"{self.name}: fact at q={fact.q} has no provenance")

    def fact_at(self, q: int) -> Optional[CoverFact]:
        return next((f for f in self.facts if f.q == q), None)


Descriptor = Union[SeifertMatrix, TwoBridge, FactRecord]


@dataclass(frozen=True)
class Leaf:
    name: str
    knot: Descriptor


@dataclass(frozen=True)
class Mirror:
    expr: "KnotExpr"


@dataclass(frozen=True)
class Sum:
    terms: Tuple[Tuple["KnotExpr", int], ...] = field(default_factory=tuple)


KnotExpr = Union[Leaf, Mirror, Sum]


def leaf_alexander(knot: Descriptor) -> LaurentPoly:
    if isinstance(knot, FactRecord):
        return normalize(knot.alexander)
    return knot.alexander()


def signed_leaves(expr: KnotExpr, sign: int = 1) -> List[Tuple[Leaf, int]]:
    """Leaves in order of appearance with signed multiplicities (negative = mirrored)."""
    if isinstance(expr, Leaf):
        return [(expr, sign)]
    if isinstance(expr, Mirror):
        return signed_leaves(expr.expr, -sign)
    out: List[Tuple[Leaf, int]] = []
    for sub, n in expr.terms:
        out.extend(signed_leaves(sub, sign * n))
    return out


def summand_classes(expr: KnotExpr) -> List[Tuple[Leaf, int]]:
    """
    Merge leaves with the same name and orientation.

    K and -K stay separate classes, so a sum like K # -K is never silently
    cancelled.
    """
    totals: Dict[Tuple[str, bool], List] = {}
    for leaf, n in signed_leaves(expr):
        key = (leaf.name, n < 0)
        if key in totals:
            totals[key][1] += n
        else:
            totals[key] = [leaf, n]
    return [(leaf, n) for leaf, n in totals.values() if n != 0]


def alexander(expr: KnotExpr) -> LaurentPoly:
    """Normalized product of leaf Alexander polynomials with multiplicity."""
    result = LaurentPoly.constant(1)
    for leaf, n in signed_leaves(expr):
        result = result * leaf_alexander(leaf.knot) ** abs(n)
    return normalize(result)


def class_label(leaf: Leaf, n: int) -> str:
    if n == 1:
        return leaf.name
    if n == -1:
        return f"-{leaf.name}"
    return f"({n}){leaf.name}"


@dataclass(frozen=True)
class CoprimalityResult:
    """Pairwise coprimality of a list of polynomials, with Bezout witnesses per pair."""

    ok: bool
    certificates: Dict[Tuple[int, int], BezoutCertificate]
    failures: Dict[Tuple[int, int], LaurentPoly]


def pairwise_coprime_polys(polys: Sequence[LaurentPoly]) -> CoprimalityResult:
    if len(polys) < 2:
        raise NotEnoughSummandsError(f"coprimality needs at least 2 polynomials, got {len(polys)}")
    certificates = {}
    failures = {}
    for i, j in combinations(range(len(polys)), 2):
        g, cert = gcd_bezout(polys[i], polys[j])
        if cert is None:
            failures[(i, j)] = g
        else:
            certificates[(i, j)] = cert
    return CoprimalityResult(ok=not failures, certificates=certificates, failures=failures)


def pairwise_coprime(leaves: Sequence[KnotExpr]) -> CoprimalityResult:
    return pairwise_coprime_polys([alexander(e) for e in leaves])


_NAME = r"[A-Za-z][A-Za-z0-9_]*"
_TERM = re.compile(
    r"\s*(?P<sign>[+-])?\s*(?:\(\s*(?P<paren>[+-]?\d+)\s*\)|(?P<count>\d+))?\s*\*?\s*(?P<name>" + _NAME + r")\s*"
)


def parse_terms(text: str) -> List[Tuple[str, int]]:
    """
    Parse "K + (-1)K_3", "2K - K_5" or "K + 3*K_7" into (name, multiplicity) pairs.
    """
    terms = []
    position = 0
    text = text.strip()
    if not text:
        raise InvalidExpressionError("empty knot expression")
    while position < len(text):
        match = _TERM.match(text, position)
        if not match or match.end() == position:
            raise InvalidExpressionError(f"cannot parse knot expression at: {text[position:]!r}")
        if terms and not match.group("sign"):
            raise InvalidExpressionError(f"expected '+' or '-' before {match.group('name')!r}")
        multiplicity = int(match.group("paren") or match.group("count") or 1)
        if match.group("sign") == "-":
            multiplicity = -multiplicity
        if multiplicity == 0:
            raise InvalidExpressionError(f"zero multiplicity for {match.group('name')!r}")
        terms.append((match.group("name"), multiplicity))
        position = match.end()
    return terms


def parse_expression(text: str, resolve: Callable[[str], KnotExpr]) -> KnotExpr:
    """Parse a sum expression, resolving names through ``resolve``."""
    terms = parse_terms(text)
    if len(terms) == 1 and terms[0][1] == 1:
        return resolve(terms[0][0])
    logger.debug(f"Parsed expression {text!r} into {len(terms)} terms")
    return Sum(tuple((resolve(name), n) for name, n in terms))
