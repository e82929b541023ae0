"""
Verdict models and report rendering.

Verdicts are pydantic models so every report serializes to deterministic JSON
and can be parsed back by ``dslice verify``. Rationals are written as "a/b".
"""

import json
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence

from pydantic import BaseModel, Field

from .covers import LinkedGroup
from .dinv import DBar, DEntry, EntryKind, Relation
from .laurent import LaurentPoly, to_fraction
from .linkform import MetabolizerPair, Subgroup


class Status(str, Enum):
    OBSTRUCTED = "OBSTRUCTED"
    NOT_OBSTRUCTED = "NOT_OBSTRUCTED"
    INCONCLUSIVE = "INCONCLUSIVE"


class CheckKind(str, Enum):
    SLICE = "slice"
    DOUBLY_VANISHING = "doubly-vanishing"
    DOUBLY_SLICE = "doubly-slice"
    SPLIT = "split"
    SUMMAND = "summand"
    FACT = "fact"


class GroupData(BaseModel):
    q: int
    invariant_factors: List[int]
    gram: List[List[str]]
    t_action: List[List[int]]


class SubgroupData(BaseModel):
    basis: List[List[int]]
    order: int
    generators: List[List[int]] = Field(default_factory=list)


class PairData(BaseModel):
    g1: SubgroupData
    g2: SubgroupData


class DValue(BaseModel):
    element: List[int]
    kind: EntryKind
    value: Optional[str] = None
    relation: Optional[Relation] = None
    provenance: Optional[str] = None


class Failure(BaseModel):
    """Why one candidate (or the whole search) cannot witness vanishing."""

    reason: str
    subgroup: Optional[SubgroupData] = None
    pair: Optional[PairData] = None
    element: Optional[DValue] = None


class ClassData(BaseModel):
    """One summand class of a split: its label and normalized Alexander polynomial."""

    label: str
    alexander: Dict[str, str]


class CertificateData(BaseModel):
    """f1 * left + f2 * right = c, polynomials as exponent -> coefficient maps."""

    left: str
    right: str
    left_alexander: Dict[str, str]
    right_alexander: Dict[str, str]
    f1: Dict[str, str]
    f2: Dict[str, str]
    c: int


class CoprimeFailureData(BaseModel):
    left: str
    right: str
    gcd: Dict[str, str]


class Verdict(BaseModel):
    check: CheckKind
    knot: str
    status: Status
    q: Optional[int] = None
    lambda_invariant: bool = False
    group: Optional[GroupData] = None
    basepoint: Optional[DValue] = None
    dbar: List[DValue] = Field(default_factory=list)
    witnesses: List[SubgroupData] = Field(default_factory=list)
    pairs: List[PairData] = Field(default_factory=list)
    failures: List[Failure] = Field(default_factory=list)
    blocking: List[DValue] = Field(default_factory=list)
    provenance: List[str] = Field(default_factory=list)
    classes: List[ClassData] = Field(default_factory=list)
    certificates: List[CertificateData] = Field(default_factory=list)
    coprime_failures: List[CoprimeFailureData] = Field(default_factory=list)
    orders: Dict[str, int] = Field(default_factory=dict)
    parts: List["Verdict"] = Field(default_factory=list)
    conventions: Dict[str, Any] = Field(default_factory=dict)


Verdict.model_rebuild()


def group_data(H: LinkedGroup) -> GroupData:
    return GroupData(
        q=H.q,
        invariant_factors=list(H.invariant_factors),
        gram=[[str(v) for v in row] for row in H.gram],
        t_action=[list(row) for row in H.t_action],
    )


def group_from_data(data: GroupData) -> LinkedGroup:
    H = LinkedGroup(
        q=data.q,
        invariant_factors=tuple(data.invariant_factors),
        gram=tuple(tuple(to_fraction(v) for v in row) for row in data.gram),
        t_action=tuple(tuple(row) for row in data.t_action),
    )
    H.validate()
    return H


def subgroup_data(P: Subgroup) -> SubgroupData:
    return SubgroupData(
        basis=[list(row) for row in P.basis], order=P.order, generators=[list(g) for g in P.generators]
    )


def subgroup_from_data(data: SubgroupData, H: LinkedGroup) -> Subgroup:
    return Subgroup.generated_by(data.basis, H.invariant_factors)


def pair_data(pair: MetabolizerPair) -> PairData:
    return PairData(g1=subgroup_data(pair.g1), g2=subgroup_data(pair.g2))


def dvalue(element: Sequence[int], entry: DEntry) -> DValue:
    return DValue(
        element=list(element),
        kind=entry.kind,
        value=str(entry.value) if entry.value is not None else None,
        relation=entry.relation,
        provenance=entry.provenance,
    )


def entry_from_dvalue(data: DValue) -> DEntry:
    if data.kind is EntryKind.UNKNOWN:
        return DEntry.unknown()
    value = to_fraction(data.value)
    if data.kind is EntryKind.EXACT:
        return DEntry.exact(value, data.provenance)
    return DEntry.bound(data.relation, value, data.provenance)


def dbar_data(db: DBar) -> List[DValue]:
    return [dvalue(e, v) for e, v in db.entries]


def dbar_from_data(H: LinkedGroup, basepoint: Optional[DValue], entries: Sequence[DValue]) -> DBar:
    base = entry_from_dvalue(basepoint) if basepoint else DEntry.unknown()
    return DBar(H, tuple(sorted((tuple(v.element), entry_from_dvalue(v)) for v in entries)), base)


def poly_to_map(p: LaurentPoly) -> Dict[str, str]:
    return {str(e): str(c) for e, c in p.terms}


def poly_from_map(mapping: Dict[str, Any]) -> LaurentPoly:
    return LaurentPoly.from_dict({int(e): to_fraction(c) for e, c in mapping.items()})


def render_json(verdict: Verdict) -> str:
    return json.dumps(verdict.model_dump(mode="json"), sort_keys=True, indent=2)


def _subgroup_label(data: SubgroupData) -> str:
    if not data.generators:
        return "<0>"
    return "<" + ", ".join("(" + ", ".join(str(x) for x in g) + ")" for g in data.generators) + ">"


def _dvalue_label(data: DValue) -> str:
    element = "(" + ", ".join(str(x) for x in data.element) + ")"
    if data.kind is EntryKind.EXACT:
        body = data.value
    elif data.kind is EntryKind.BOUND:
        body = f"{data.relation.value} {data.value}"
    else:
        body = "unknown"
    return f"{element}: {body}"


def _describe_group(data: GroupData) -> str:
    if not data.invariant_factors:
        return "0"
    return " + ".join(f"Z/{d}" for d in data.invariant_factors)


def render_text(verdict: Verdict, indent: int = 0) -> str:
    pad = "  " * indent
    title = f"{pad}[{verdict.status.value}] {verdict.check.value} {verdict.knot}"
    if verdict.q is not None:
        title += f" q={verdict.q}"
    if verdict.lambda_invariant:
        title += " (Lambda-invariant)"
    lines = [title]
    inner = pad + "  "

    if verdict.group is not None:
        lines.append(f"{inner}group: {_describe_group(verdict.group)}")
    if verdict.basepoint is not None:
        lines.append(f"{inner}basepoint d(s0): {_dvalue_label(verdict.basepoint).split(': ', 1)[1]}")
    for label, value in sorted(verdict.orders.items()):
        lines.append(f"{inner}|H_1| {label}: {value}")
    if verdict.witnesses:
        lines.append(f"{inner}witnesses:")
        lines.extend(f"{inner}  {_subgroup_label(w)} (order {w.order})" for w in verdict.witnesses)
    if verdict.pairs:
        lines.append(f"{inner}pairs: {len(verdict.pairs)}")
        lines.extend(f"{inner}  {_subgroup_label(p.g1)} + {_subgroup_label(p.g2)}" for p in verdict.pairs)
    if verdict.failures:
        lines.append(f"{inner}failures:")
        for failure in verdict.failures:
            text = failure.reason
            if failure.subgroup is not None:
                text += f" {_subgroup_label(failure.subgroup)}"
            if failure.pair is not None:
                text += f" {_subgroup_label(failure.pair.g1)} + {_subgroup_label(failure.pair.g2)}"
            if failure.element is not None:
                text += f" at {_dvalue_label(failure.element)}"
            lines.append(f"{inner}  - {text}")
    if verdict.blocking:
        lines.append(f"{inner}unknown entries blocking a decision:")
        lines.extend(f"{inner}  - {_dvalue_label(b)}" for b in verdict.blocking)
    if verdict.classes:
        lines.append(f"{inner}summand classes:")
        lines.extend(f"{inner}  {c.label}: {poly_from_map(c.alexander)}" for c in verdict.classes)
    if verdict.certificates:
        lines.append(f"{inner}Bezout certificates:")
        for cert in verdict.certificates:
            f1 = poly_from_map(cert.f1)
            f2 = poly_from_map(cert.f2)
            lines.append(f"{inner}  {cert.left} vs {cert.right}: ({f1})*D1 + ({f2})*D2 = {cert.c}")
    if verdict.coprime_failures:
        lines.append(f"{inner}coprimality fails:")
        for failure in verdict.coprime_failures:
            lines.append(f"{inner}  {failure.left} vs {failure.right}: gcd {poly_from_map(failure.gcd)}")
    if verdict.provenance:
        lines.append(f"{inner}provenance:")
        lines.extend(f"{inner}  - {p}" for p in verdict.provenance)
    for part in verdict.parts:
        lines.append(render_text(part, indent + 1))
    if verdict.conventions and indent == 0:
        flags = " ".join(f"{k}={v}" for k, v in sorted(verdict.conventions.items()))
        lines.append(f"{inner}conventions: {flags}")
    return "\n".join(lines)


def render(verdict: Verdict, fmt: str = "text") -> str:
    return render_json(verdict) if fmt == "json" else render_text(verdict)


def parse_verdict(text: str) -> Verdict:
    return Verdict.model_validate_json(text)