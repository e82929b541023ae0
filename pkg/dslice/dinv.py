"""
Correction-term tables.

A DTable assigns to each element a of a linked group the correction term of
the Spin^c structure s0 + a. Entries are exact values, one-sided bounds, or
unknown; obstructions only ever consume certified information.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .cache import get_lens_cache
from .covers import Element, LinkedGroup, direct_sum, two_bridge_group
from .errors import BadFractionError, ElementOutOfRangeError, MalformedRecordError, MismatchedCoverError
from .knots import TwoBridge
from .logging_config import get_logger

logger = get_logger(__name__)


class EntryKind(str, Enum):
    EXACT = "exact"
    BOUND = "bound"
    UNKNOWN = "unknown"


class Relation(str, Enum):
    LE = "<="
    GE = ">="
    NE = "!="

    def flipped(self) -> "Relation":
        return {Relation.LE: Relation.GE, Relation.GE: Relation.LE, Relation.NE: Relation.NE}[self]


@dataclass(frozen=True)
class DEntry:
    kind: EntryKind
    value: Optional[Fraction] = None
    relation: Optional[Relation] = None
    provenance: Optional[str] = None

    @classmethod
    def exact(cls, value, provenance: Optional[str] = None) -> "DEntry":
        return cls(EntryKind.EXACT, Fraction(value), None, provenance)

    @classmethod
    def bound(cls, relation: Relation, value, provenance: Optional[str] = None) -> "DEntry":
        return cls(EntryKind.BOUND, Fraction(value), Relation(relation), provenance)

    @classmethod
    def unknown(cls) -> "DEntry":
        return cls(EntryKind.UNKNOWN)

    @property
    def is_exact_zero(self) -> bool:
        return self.kind is EntryKind.EXACT and self.value == 0

    @property
    def certified_nonzero(self) -> bool:
        if self.kind is EntryKind.EXACT:
            return self.value != 0
        if self.kind is EntryKind.BOUND:
            if self.relation is Relation.LE:
                return self.value < 0
            if self.relation is Relation.GE:
                return self.value > 0
            return self.value == 0
        return False

    def shifted(self, delta: Fraction, provenance: Optional[str] = None) -> "DEntry":
        if self.kind is EntryKind.UNKNOWN:
            return self
        return DEntry(self.kind, self.value + delta, self.relation, provenance or self.provenance)

    def negated(self) -> "DEntry":
        if self.kind is EntryKind.UNKNOWN:
            return self
        relation = self.relation.flipped() if self.relation else None
        return DEntry(self.kind, -self.value, relation, self.provenance)

    def __add__(self, other: "DEntry") -> "DEntry":
        provenance = _join_provenance(self.provenance, other.provenance)
        if self.kind is EntryKind.EXACT and other.kind is EntryKind.EXACT:
            return DEntry.exact(self.value + other.value, provenance)
        if self.kind is EntryKind.BOUND and other.kind is EntryKind.EXACT:
            return self.shifted(other.value, provenance)
        if self.kind is EntryKind.EXACT and other.kind is EntryKind.BOUND:
            return other.shifted(self.value, provenance)
        return DEntry.unknown()

    def label(self) -> str:
        if self.kind is EntryKind.EXACT:
            return str(self.value)
        if self.kind is EntryKind.BOUND:
            return f"{self.relation.value} {self.value}"
        return "unknown"


def _join_provenance(a: Optional[str], b: Optional[str]) -> Optional[str]:
    parts = [p for p in (a, b) if p]
    if not parts:
        return None
    return "; ".join(dict.fromkeys(parts))


def _check_element(host: LinkedGroup, element: Sequence[int]) -> Element:
    element = tuple(element)
    if not host.contains(element):
        raise ElementOutOfRangeError(f"element {list(element)} is not in {host.describe()}")
    return element


@dataclass(frozen=True)
class DTable:
    """d(s0 + a) for a in ``host``; elements not listed are unknown."""

    host: LinkedGroup
    entries: Tuple[Tuple[Element, DEntry], ...] = field(default_factory=tuple)

    @classmethod
    def from_mapping(cls, host: LinkedGroup, mapping: Dict[Element, DEntry]) -> "DTable":
        kept = tuple(sorted((e, v) for e, v in mapping.items() if v.kind is not EntryKind.UNKNOWN))
        return cls(host, kept)

    def as_dict(self) -> Dict[Element, DEntry]:
        return dict(self.entries)

    def get(self, element: Sequence[int]) -> DEntry:
        return self.as_dict().get(tuple(element), DEntry.unknown())

    @property
    def basepoint(self) -> DEntry:
        return self.get(self.host.zero)

    def negated(self) -> "DTable":
        """Table of the orientation-reversed cover, d(-Y) = -d(Y)."""
        return DTable(self.host.negated(), tuple((e, v.negated()) for e, v in self.entries))

    def provenance(self) -> List[str]:
        return sorted({v.provenance for _, v in self.entries if v.provenance})


@dataclass(frozen=True)
class DBar:
    """Normalized table d(s0 + a) - d(s0), with the basepoint entry kept for reference."""

    host: LinkedGroup
    entries: Tuple[Tuple[Element, DEntry], ...]
    basepoint: DEntry = field(default_factory=DEntry.unknown)

    def as_dict(self) -> Dict[Element, DEntry]:
        return dict(self.entries)

    def get(self, element: Sequence[int]) -> DEntry:
        element = tuple(element)
        if element == self.host.zero:
            return DEntry.exact(0, self.basepoint.provenance)
        return self.as_dict().get(element, DEntry.unknown())

    def provenance(self) -> List[str]:
        found = {v.provenance for _, v in self.entries if v.provenance}
        if self.basepoint.provenance:
            found.add(self.basepoint.provenance)
        return sorted(found)


@get_lens_cache().memoize()
def lens_d(p: int, q: int) -> Tuple[Fraction, ...]:
    """
    Correction terms of L(p, q) by the two-term recursion

        d(L(p, q), i) = ((2i + 1 - p - q)^2 - pq) / (4pq) - d(L(q, p mod q), i mod q)

    with d(L(1, 0)) = (0,).
    """
    if p < 1:
        raise BadFractionError(f"lens space needs p >= 1, got {p}")
    q %= p
    if p == 1:
        return (Fraction(0),)
    if gcd(p, q) != 1:
        raise BadFractionError(f"L({p}, {q}) needs gcd(p, q) = 1")
    inner = lens_d(q, p % q)
    return tuple(
        Fraction((2 * i + 1 - p - q) ** 2 - p * q, 4 * p * q) - inner[i % q] for i in range(p)
    )


def self_conjugate_index(p: int, q: int) -> int:
    """The fixed point of i -> q - 1 - i mod p, for odd p."""
    if p % 2 == 0:
        raise BadFractionError(f"self-conjugate index needs odd p, got {p}")
    return ((q - 1) * ((p + 1) // 2)) % p


def lens_index(p: int, q: int, k: int) -> int:
    """
    Lens-space Spin^c index of s0 + k*g, where g generates Z/p with
    lambda(g, g) = -q/p under the default sign.
    """
    return (self_conjugate_index(p, q) + q * k) % p


def two_bridge_dtable(knot: TwoBridge, host: Optional[LinkedGroup] = None) -> DTable:
    """Exact d-table on H_1(L(p, q)) = Z/p, relabelled so element 0 is s0."""
    if host is None:
        host = two_bridge_group(knot.p, knot.q)
    provenance = f"lens space recursion L({knot.p},{knot.q})"
    if knot.p == 1:
        return DTable(host, ((host.zero, DEntry.exact(0, provenance)),))
    values = lens_d(knot.p, knot.q)
    mapping = {(k,): DEntry.exact(values[lens_index(knot.p, knot.q, k)], provenance) for k in range(knot.p)}
    return DTable.from_mapping(host, mapping)


@dataclass(frozen=True)
class DRecord:
    """One external datum: the correction term at s0 + element."""

    element: Tuple[int, ...]
    entry: DEntry


def ingest_dtable(host: LinkedGroup, records: Iterable[DRecord]) -> DTable:
    mapping: Dict[Element, DEntry] = {}
    for record in records:
        element = _check_element(host, record.element)
        if not record.entry.provenance or not record.entry.provenance.strip():
            raise MalformedRecordError(f"d-record at {list(element)} has no provenance")
        if record.entry.kind is EntryKind.UNKNOWN:
            raise MalformedRecordError(f"d-record at {list(element)} carries neither a value nor a bound")
        if element in mapping:
            raise MalformedRecordError(f"duplicate d-record for element {list(element)}")
        mapping[element] = record.entry
    if mapping:
        logger.warning(f"Using {len(mapping)} imported d-records on {host.describe()}")
    return DTable.from_mapping(host, mapping)


@dataclass(frozen=True)
class DRecordSet:
    """All records for one knot and one cover, as read from a d-record file."""

    knot: str
    q: int
    records: Tuple[DRecord, ...]
    invariant_factors: Optional[Tuple[int, ...]] = None
    source: Optional[str] = None


def table_from_records(host: LinkedGroup, record_set: DRecordSet) -> DTable:
    if record_set.q != host.q:
        raise MismatchedCoverError(f"d-records for {record_set.knot} are for q={record_set.q}, host has q={host.q}")
    if record_set.invariant_factors is not None and tuple(record_set.invariant_factors) != host.invariant_factors:
        raise MismatchedCoverError(
            f"d-records for {record_set.knot} declare {list(record_set.invariant_factors)}, "
            f"computed group is {host.describe()}"
        )
    return ingest_dtable(host, record_set.records)


def dbar(table: DTable) -> DBar:
    """Shift by d(s0); without an exact basepoint everything but dbar(0) is unknown."""
    base = table.basepoint
    if base.kind is not EntryKind.EXACT:
        return DBar(table.host, (), base)
    entries = tuple(
        (e, v.shifted(-base.value, _join_provenance(v.provenance, base.provenance)))
        for e, v in table.entries
        if e != table.host.zero
    )
    return DBar(table.host, entries, base)


def dtable_sum(a: DTable, b: DTable) -> DTable:
    """Table on the direct sum: d(s0 + (x, y)) = d_a(s0 + x) + d_b(s0 + y)."""
    if a.host.q != b.host.q:
        raise MismatchedCoverError(f"cannot add d-tables of covers q={a.host.q} and q={b.host.q}")
    host = direct_sum(a.host, b.host)
    mapping = {}
    for x, u in a.entries:
        for y, v in b.entries:
            total = u + v
            if total.kind is not EntryKind.UNKNOWN:
                mapping[x + y] = total
    return DTable.from_mapping(host, mapping)


def empty_dtable(host: LinkedGroup) -> DTable:
    return DTable(host, ())
