"""
Obstruction checks.

slice_check looks for a metabolizer on which the normalized correction terms
vanish; doubly_vanishing_check looks for a pair of metabolizers splitting the
group with the same property; split_doubly_slice applies the coprime
splitting argument to a connected sum. Every OBSTRUCTED verdict is derived
from certified data only and carries what is needed to re-run it.
"""

from itertools import combinations
from math import prod
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .config import get_settings, resolve_cap
from .covers import Element, LinkedGroup, linked_group
from .dinv import (
    DBar,
    DEntry,
    DRecordSet,
    DTable,
    dbar,
    dtable_sum,
    empty_dtable,
    table_from_records,
    two_bridge_dtable,
)
from .errors import InvalidExpressionError, NotEnoughSummandsError, NotPrimePowerError
from .knots import (
    FactRecord,
    KnotExpr,
    Leaf,
    SeifertMatrix,
    Sum,
    TwoBridge,
    class_label,
    leaf_alexander,
    signed_leaves,
    summand_classes,
)
from .laurent import LaurentPoly, gcd_bezout, normalize
from .linkform import Subgroup, metabolizer_pairs, metabolizers
from .logging_config import cover_context, get_logger
from .report import (
    CertificateData,
    ClassData,
    CheckKind,
    CoprimeFailureData,
    Failure,
    Status,
    Verdict,
    dbar_data,
    dbar_from_data,
    dvalue,
    group_data,
    group_from_data,
    pair_data,
    poly_from_map,
    poly_to_map,
    subgroup_data,
    subgroup_from_data,
)

logger = get_logger(__name__)

DSources = Mapping[Tuple[str, int], DRecordSet]


def _conventions(cap: Optional[int], require_lambda: bool, sign: Optional[int] = None) -> dict:
    conventions = get_settings().conventions()
    conventions.update(require_lambda=require_lambda, cap=resolve_cap(cap))
    if sign is not None:
        conventions["sign"] = sign
    return conventions


def aggregate(statuses: Iterable[Status]) -> Status:
    """OBSTRUCTED dominates, then INCONCLUSIVE. Nothing checked is INCONCLUSIVE."""
    statuses = list(statuses)
    if Status.OBSTRUCTED in statuses:
        return Status.OBSTRUCTED
    if Status.INCONCLUSIVE in statuses or not statuses:
        return Status.INCONCLUSIVE
    return Status.NOT_OBSTRUCTED


def require_degrees(qs: Sequence[int]) -> None:
    if not qs:
        raise NotPrimePowerError("no cover degrees to check; the range holds no prime power")


class _Scan:
    """Classify candidate subgroups by the d-bar values on their elements."""

    def __init__(self, db: DBar):
        self.db = db
        self.witnesses: List[object] = []
        self.failed: List[Tuple[object, Element, DEntry]] = []
        self.blocking: Dict[Element, DEntry] = {}

    def add(self, candidate: object, elements: Sequence[Element]) -> None:
        values = [(e, self.db.get(e)) for e in elements]
        nonzero = next(((e, v) for e, v in values if v.certified_nonzero), None)
        if nonzero is not None:
            self.failed.append((candidate, nonzero[0], nonzero[1]))
        elif all(v.is_exact_zero for _, v in values):
            self.witnesses.append(candidate)
        else:
            for e, v in values:
                if not v.is_exact_zero:
                    self.blocking[e] = v

    @property
    def status(self) -> Status:
        if self.witnesses:
            return Status.NOT_OBSTRUCTED
        if not self.blocking:
            return Status.OBSTRUCTED
        return Status.INCONCLUSIVE


def _base_verdict(check: CheckKind, knot: str, H: LinkedGroup, db: DBar, lambda_invariant: bool, conventions):
    return dict(
        check=check,
        knot=knot,
        q=H.q,
        lambda_invariant=lambda_invariant,
        group=group_data(H),
        basepoint=dvalue(H.zero, db.basepoint),
        dbar=dbar_data(db),
        provenance=db.provenance(),
        conventions=conventions,
    )


def slice_check(
    H: LinkedGroup,
    db: DBar,
    lambda_invariant: bool = True,
    cap: Optional[int] = None,
    knot: str = "",
) -> Verdict:
    """
    NOT_OBSTRUCTED when some (Lambda-)metabolizer has d-bar exactly 0 on all
    its elements; OBSTRUCTED when d(s0) is certified nonzero, there is no
    metabolizer, or every metabolizer carries a certified nonzero d-bar.
    """
    fields = _base_verdict(CheckKind.SLICE, knot, H, db, lambda_invariant, _conventions(cap, lambda_invariant))
    if db.basepoint.certified_nonzero:
        return Verdict(
            status=Status.OBSTRUCTED,
            failures=[Failure(reason="basepoint d(s0) certified nonzero", element=dvalue(H.zero, db.basepoint))],
            **fields,
        )

    mets = metabolizers(H, lambda_invariant, cap)
    if not mets:
        kind = "Lambda-metabolizer" if lambda_invariant else "metabolizer"
        return Verdict(status=Status.OBSTRUCTED, failures=[Failure(reason=f"no {kind} exists")], **fields)

    scan = _Scan(db)
    for P in mets:
        scan.add(P, P.elements())
    verdict = Verdict(
        status=scan.status,
        witnesses=[subgroup_data(P) for P in scan.witnesses],
        failures=[
            Failure(reason="certified nonzero d-bar on", subgroup=subgroup_data(P), element=dvalue(e, v))
            for P, e, v in scan.failed
        ],
        blocking=[dvalue(e, v) for e, v in sorted(scan.blocking.items())] if not scan.witnesses else [],
        **fields,
    )
    logger.info(f"slice check {knot}: {verdict.status.value}")
    return verdict


def doubly_vanishing_check(
    H: LinkedGroup,
    db: DBar,
    require_lambda: bool = False,
    cap: Optional[int] = None,
    knot: str = "",
    check: CheckKind = CheckKind.DOUBLY_VANISHING,
) -> Verdict:
    """
    NOT_OBSTRUCTED when some metabolizer pair H = G1 + G2 (Lambda-invariant
    when required) has d-bar exactly 0 on G1 and G2; OBSTRUCTED when there is
    no pair or every pair meets a certified nonzero d-bar.
    """
    fields = _base_verdict(check, knot, H, db, require_lambda, _conventions(cap, require_lambda))
    pairs = metabolizer_pairs(H, require_lambda, cap)
    if not pairs:
        return Verdict(status=Status.OBSTRUCTED, failures=[Failure(reason="no metabolizer pair exists")], **fields)

    scan = _Scan(db)
    for pair in pairs:
        elements = sorted(set(pair.g1.elements()) | set(pair.g2.elements()))
        scan.add(pair, elements)
    verdict = Verdict(
        status=scan.status,
        pairs=[pair_data(p) for p in (scan.witnesses if scan.witnesses else pairs)],
        failures=[
            Failure(reason="certified nonzero d-bar on pair", pair=pair_data(p), element=dvalue(e, v))
            for p, e, v in scan.failed
        ],
        blocking=[dvalue(e, v) for e, v in sorted(scan.blocking.items())] if not scan.witnesses else [],
        **fields,
    )
    logger.info(f"doubly vanishing check {knot}: {verdict.status.value}")
    return verdict


def check_over_q(run: Callable[[int], Verdict], qs: Sequence[int], check: CheckKind, knot: str) -> Verdict:
    """Run ``run`` for every q and aggregate; per-q verdicts become parts."""
    require_degrees(qs)
    parts = []
    for q in qs:
        with cover_context(knot, q):
            parts.append(run(q))
    if len(parts) == 1:
        return parts[0]
    return Verdict(
        check=check,
        knot=knot,
        status=aggregate(p.status for p in parts),
        lambda_invariant=parts[0].lambda_invariant,
        parts=parts,
        conventions=parts[0].conventions,
    )


def leaf_table(leaf: Leaf, q: int, H: LinkedGroup, sources: DSources) -> DTable:
    """d-table for a single leaf: ingested records, the lens recursion, or nothing."""
    knot = leaf.knot
    record_set = sources.get((leaf.name, q))
    if record_set is not None:
        return table_from_records(H, record_set)
    if isinstance(knot, TwoBridge) and q == 2:
        return two_bridge_dtable(knot, H)
    if isinstance(knot, SeifertMatrix) and knot.V.rows == 0:
        return DTable(H, ((H.zero, DEntry.exact(0, "d(S^3) = 0")),))
    return empty_dtable(H)


def expression_cover(
    expr: KnotExpr, q: int, sources: DSources, sign: Optional[int] = None
) -> Tuple[LinkedGroup, DTable]:
    """
    Linked group and d-table of a connected sum, summand by summand.

    Mirrored summands contribute the negated form and negated d-values;
    repeated summands contribute one direct summand per copy.
    """
    H: Optional[LinkedGroup] = None
    table: Optional[DTable] = None
    for leaf, n in signed_leaves(expr):
        if isinstance(leaf.knot, FactRecord):
            raise InvalidExpressionError(f"{leaf.name} only carries declared facts and has no computable cover")
        piece_group = linked_group(leaf.knot, q, sign)
        piece_table = leaf_table(leaf, q, piece_group, sources)
        if n < 0:
            piece_table = piece_table.negated()
        for _ in range(abs(n)):
            if table is None:
                H, table = piece_table.host, piece_table
            else:
                table = dtable_sum(table, piece_table)
                H = table.host
    if table is None:
        H = LinkedGroup.trivial(q)
        table = DTable(H, ((H.zero, DEntry.exact(0, "d(S^3) = 0")),))
    return H, table


def run_check(
    mode: CheckKind,
    expr: KnotExpr,
    knot: str,
    qs: Sequence[int],
    sources: DSources,
    require_lambda: Optional[bool] = None,
    cap: Optional[int] = None,
    sign: Optional[int] = None,
) -> Verdict:
    """
    The check behind ``dslice check``: one mode over a range of prime powers.

    ``require_lambda`` defaults per mode: slice and doubly-slice use
    Lambda-metabolizers, doubly-vanishing uses plain metabolizers.
    """
    if require_lambda is None:
        require_lambda = mode is not CheckKind.DOUBLY_VANISHING

    def run(q: int) -> Verdict:
        H, table = expression_cover(expr, q, sources, sign)
        db = dbar(table)
        if mode is CheckKind.SLICE:
            verdict = slice_check(H, db, lambda_invariant=require_lambda, cap=cap, knot=knot)
        elif mode is CheckKind.DOUBLY_SLICE:
            verdict = doubly_vanishing_check(H, db, require_lambda, cap, knot, check=CheckKind.DOUBLY_SLICE)
        else:
            verdict = doubly_vanishing_check(H, db, require_lambda, cap, knot)
        if sign is not None:
            verdict.conventions["sign"] = sign
        return verdict

    return check_over_q(run, qs, mode, knot)


def _certificate(left: str, right: str, p: LaurentPoly, q: LaurentPoly, cert) -> CertificateData:
    return CertificateData(
        left=left,
        right=right,
        left_alexander=poly_to_map(p),
        right_alexander=poly_to_map(q),
        f1=poly_to_map(cert.f1),
        f2=poly_to_map(cert.f2),
        c=cert.c,
    )


def _fact_verdict(record: FactRecord, label: str, n: int, q: int) -> Verdict:
    if abs(n) != 1:
        return Verdict(
            check=CheckKind.FACT,
            knot=label,
            q=q,
            status=Status.INCONCLUSIVE,
            failures=[Failure(reason="declared facts only apply to a single copy of the knot")],
        )
    fact = record.fact_at(q)
    if fact is None:
        return Verdict(
            check=CheckKind.FACT,
            knot=label,
            q=q,
            status=Status.INCONCLUSIVE,
            failures=[Failure(reason=f"no declared fact for q={q}")],
        )
    logger.warning(f"Trusting declared fact for {record.name} at q={q}: {fact.provenance}")
    if fact.doubly_vanishing:
        return Verdict(check=CheckKind.FACT, knot=label, q=q, status=Status.NOT_OBSTRUCTED, provenance=[fact.provenance])
    return Verdict(
        check=CheckKind.FACT,
        knot=label,
        q=q,
        status=Status.OBSTRUCTED,
        failures=[Failure(reason="declared: does not have doubly vanishing d-invariants")],
        provenance=[fact.provenance],
        orders={f"q={q}": prod(fact.invariant_factors)},
    )


def summand_verdict(
    leaf: Leaf,
    n: int,
    qs: Sequence[int],
    sources: DSources,
    require_lambda: bool = False,
    cap: Optional[int] = None,
    sign: Optional[int] = None,
) -> Verdict:
    """Doubly vanishing check for the class n*leaf over every q."""
    require_degrees(qs)
    label = class_label(leaf, n)
    if isinstance(leaf.knot, FactRecord):
        parts = [_fact_verdict(leaf.knot, label, n, q) for q in qs]
    else:
        expr = leaf if n == 1 else Sum(((leaf, n),))
        parts = [
            run_check(CheckKind.DOUBLY_VANISHING, expr, label, [q], sources, require_lambda, cap, sign) for q in qs
        ]
    orders = {}
    for part in parts:
        if part.group is not None:
            orders[f"q={part.q}"] = prod(part.group.invariant_factors)
        orders.update(part.orders)
    return Verdict(
        check=CheckKind.SUMMAND,
        knot=label,
        status=aggregate(p.status for p in parts),
        lambda_invariant=require_lambda,
        parts=parts,
        orders=orders,
        provenance=sorted({p for part in parts for p in part.provenance}),
    )


def split_classes(expr: KnotExpr) -> List[Tuple[Leaf, int]]:
    """Summand classes for splitting; a single repeated class splits into its copies."""
    classes = summand_classes(expr)
    if len(classes) == 1 and abs(classes[0][1]) > 1:
        leaf, n = classes[0]
        classes = [(leaf, 1 if n > 0 else -1)] * abs(n)
    if len(classes) < 2:
        raise NotEnoughSummandsError(f"splitting needs at least 2 summand classes, got {len(classes)}")
    return classes


def coprimality_checks(
    labels: Sequence[str], polys: Sequence[LaurentPoly]
) -> List[Tuple[str, str, LaurentPoly, LaurentPoly]]:
    """
    Every pair of classes, and with more than two classes each class against
    the product of the others.
    """
    checks = [(labels[i], labels[j], polys[i], polys[j]) for i, j in combinations(range(len(labels)), 2)]
    if len(labels) > 2:
        for i in range(len(labels)):
            rest = LaurentPoly.constant(1)
            for j, p in enumerate(polys):
                if j != i:
                    rest = rest * p
            rest_label = " # ".join(labels[j] for j in range(len(labels)) if j != i)
            checks.append((labels[i], rest_label, polys[i], normalize(rest)))
    return checks


def split_doubly_slice(
    expr: KnotExpr,
    qs: Sequence[int],
    sources: Optional[DSources] = None,
    require_lambda: bool = False,
    cap: Optional[int] = None,
    sign: Optional[int] = None,
    knot: str = "",
) -> Verdict:
    """
    Coprime splitting: if K = K1 # K2 with coprime Alexander polynomials is
    doubly slice then both summands have doubly vanishing d-invariants, so
    an obstructed class obstructs the whole sum.
    """
    require_degrees(qs)
    sources = sources or {}
    classes = split_classes(expr)
    labels = [class_label(leaf, n) for leaf, n in classes]
    polys = [normalize(leaf_alexander(leaf.knot) ** abs(n)) for leaf, n in classes]
    conventions = _conventions(cap, require_lambda, sign)

    certificates = []
    failures = []
    for left, right, p, q in coprimality_checks(labels, polys):
        gcd, cert = gcd_bezout(p, q)
        if cert is None:
            failures.append(CoprimeFailureData(left=left, right=right, gcd=poly_to_map(gcd)))
        else:
            certificates.append(_certificate(left, right, p, q, cert))

    knot = knot or " # ".join(labels)
    class_data = [ClassData(label=label, alexander=poly_to_map(p)) for label, p in zip(labels, polys)]
    if failures:
        logger.info(f"split {knot}: coprimality fails for {len(failures)} pairs")
        return Verdict(
            check=CheckKind.SPLIT,
            knot=knot,
            status=Status.INCONCLUSIVE,
            classes=class_data,
            certificates=certificates,
            coprime_failures=failures,
            lambda_invariant=require_lambda,
            conventions=conventions,
        )

    parts = [summand_verdict(leaf, n, qs, sources, require_lambda, cap, sign) for leaf, n in classes]
    orders = {f"{part.knot} {label}": value for part in parts for label, value in part.orders.items()}
    verdict = Verdict(
        check=CheckKind.SPLIT,
        knot=knot,
        status=aggregate(p.status for p in parts),
        classes=class_data,
        certificates=certificates,
        lambda_invariant=require_lambda,
        parts=parts,
        orders=orders,
        provenance=sorted({p for part in parts for p in part.provenance}),
        conventions=conventions,
    )
    logger.info(f"split {knot}: {verdict.status.value}")
    return verdict


def _same_subgroups(H: LinkedGroup, reported, recomputed: Sequence[Subgroup]) -> bool:
    return sorted(subgroup_from_data(s, H).basis for s in reported) == sorted(P.basis for P in recomputed)


def _verify_split(verdict: Verdict, where: str, expr: Optional[KnotExpr]) -> List[str]:
    """
    Rebuild the coprimality checks a split needs and match the reported
    certificates and failures against them one for one.

    With ``expr`` the summand classes are recomputed from the expression and
    must agree with the stored ones; without it the stored classes are used.
    """
    problems: List[str] = []
    stored = [(c.label, poly_from_map(c.alexander)) for c in verdict.classes]
    if expr is not None:
        classes = split_classes(expr)
        expected = [(class_label(leaf, n), normalize(leaf_alexander(leaf.knot) ** abs(n))) for leaf, n in classes]
        if stored != expected:
            problems.append(f"{where}: summand classes differ from the expression")
    else:
        expected = stored
    if len(expected) < 2:
        problems.append(f"{where}: fewer than 2 summand classes recorded")
        return problems

    labels = [label for label, _ in expected]
    checks = coprimality_checks(labels, [p for _, p in expected])
    operands = {(left, right): (p, q) for left, right, p, q in checks}
    wanted = sorted((left, right) for left, right, _, _ in checks)
    reported = sorted(
        [(c.left, c.right) for c in verdict.certificates] + [(f.left, f.right) for f in verdict.coprime_failures]
    )
    if reported != wanted:
        problems.append(f"{where}: {len(reported)} coprimality checks reported, {len(wanted)} required")

    for cert in verdict.certificates:
        p, q = poly_from_map(cert.left_alexander), poly_from_map(cert.right_alexander)
        if operands.get((cert.left, cert.right)) != (p, q):
            problems.append(f"{where}: certificate {cert.left} vs {cert.right} is not about the summand classes")
        f1, f2 = poly_from_map(cert.f1), poly_from_map(cert.f2)
        if not (cert.c > 0 and f1.is_integral and f2.is_integral and f1 * p + f2 * q == LaurentPoly.constant(cert.c)):
            problems.append(f"{where}: Bezout certificate {cert.left} vs {cert.right} does not verify")
    for failure in verdict.coprime_failures:
        pair = operands.get((failure.left, failure.right))
        if pair is not None and gcd_bezout(*pair)[1] is not None:
            problems.append(f"{where}: {failure.left} vs {failure.right} reported not coprime but are coprime")

    if verdict.coprime_failures:
        if verdict.status is not Status.INCONCLUSIVE:
            problems.append(f"{where}: {verdict.status.value} without full coprimality certificates")
    elif sorted(part.knot for part in verdict.parts) != sorted(labels):
        problems.append(f"{where}: summand verdicts do not match the summand classes")
    return problems


def verify(verdict: Verdict, cap: Optional[int] = None, expr: Optional[KnotExpr] = None) -> List[str]:
    """
    Re-run a verdict from its own data. Returns a list of problems; empty
    means every status, witness and certificate was reproduced.

    ``expr`` is the parsed expression of a split verdict, when available.
    """
    problems: List[str] = []
    where = f"{verdict.check.value} {verdict.knot}" + (f" q={verdict.q}" if verdict.q is not None else "")
    cap = cap if cap is not None else verdict.conventions.get("cap")

    if verdict.check is CheckKind.SPLIT:
        problems.extend(_verify_split(verdict, where, expr))

    if verdict.check is CheckKind.FACT:
        if verdict.status is not Status.INCONCLUSIVE and not verdict.provenance:
            problems.append(f"{where}: declared fact without provenance")
        return problems

    if verdict.parts:
        for part in verdict.parts:
            problems.extend(verify(part, cap))
        expected = aggregate(p.status for p in verdict.parts)
        if expected is not verdict.status:
            problems.append(f"{where}: status {verdict.status.value}, parts give {expected.value}")
        return problems

    if verdict.group is None:
        if verdict.check is not CheckKind.SPLIT:
            problems.append(f"{where}: no group data to re-run")
        return problems

    H = group_from_data(verdict.group)
    db = dbar_from_data(H, verdict.basepoint, verdict.dbar)
    if verdict.check is CheckKind.SLICE:
        rerun = slice_check(H, db, verdict.lambda_invariant, cap, verdict.knot)
        if not _same_subgroups(H, verdict.witnesses, [subgroup_from_data(w, H) for w in rerun.witnesses]):
            problems.append(f"{where}: witnesses differ on re-run")
    else:
        rerun = doubly_vanishing_check(H, db, verdict.lambda_invariant, cap, verdict.knot, check=verdict.check)
        reported = sorted(
            (subgroup_from_data(p.g1, H).basis, subgroup_from_data(p.g2, H).basis) for p in verdict.pairs
        )
        again = sorted((subgroup_from_data(p.g1, H).basis, subgroup_from_data(p.g2, H).basis) for p in rerun.pairs)
        if reported != again:
            problems.append(f"{where}: metabolizer pairs differ on re-run")
    if rerun.status is not verdict.status:
        problems.append(f"{where}: status {verdict.status.value}, re-run gives {rerun.status.value}")
    return problems
