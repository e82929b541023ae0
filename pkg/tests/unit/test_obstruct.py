"""
Unit tests for the slice, doubly vanishing and coprime splitting checks.
"""

from fractions import Fraction

import pytest

from dslice import obstruct
from dslice.covers import LinkedGroup, two_bridge_group
from dslice.dinv import DBar, DEntry, EntryKind, Relation, dbar, two_bridge_dtable
from dslice.errors import InvalidExpressionError, NotEnoughSummandsError, NotPrimePowerError
from dslice.files import load_drecords
from dslice.knots import TwoBridge
from dslice.laurent import LaurentPoly
from dslice.obstruct import (
    aggregate,
    doubly_vanishing_check,
    expression_cover,
    run_check,
    slice_check,
    split_doubly_slice,
    verify,
)
from dslice.report import CheckKind, Status, parse_verdict, poly_from_map, render_json


@pytest.fixture
def sources(chh_records):
    record_set = load_drecords(chh_records)
    return {(record_set.knot, record_set.q): record_set}


@pytest.fixture
def z7_squared() -> LinkedGroup:
    return LinkedGroup(
        3, (7, 7), ((Fraction(0), Fraction(1, 7)), (Fraction(1, 7), Fraction(0))), ((4, 0), (0, 2))
    )


def zero_dbar(H: LinkedGroup) -> DBar:
    entries = tuple((x, DEntry.exact(0, "test")) for x in H.elements() if x != H.zero)
    return DBar(H, entries, DEntry.exact(0, "test"))


@pytest.mark.unit
class TestAggregate:
    def test_precedence(self):
        assert aggregate([Status.NOT_OBSTRUCTED, Status.INCONCLUSIVE, Status.OBSTRUCTED]) is Status.OBSTRUCTED
        assert aggregate([Status.NOT_OBSTRUCTED, Status.INCONCLUSIVE]) is Status.INCONCLUSIVE
        assert aggregate([Status.NOT_OBSTRUCTED]) is Status.NOT_OBSTRUCTED
        assert aggregate([]) is Status.INCONCLUSIVE

    def test_empty_cover_range_rejected(self, library):
        with pytest.raises(NotPrimePowerError):
            run_check(CheckKind.SLICE, library.resolve("trefoil"), "trefoil", [], {})
        with pytest.raises(NotPrimePowerError):
            split_doubly_slice(library.expression("trefoil + K946"), [], {})


@pytest.mark.unit
class TestSliceCheck:
    def test_trefoil_obstructed(self, library):
        verdict = run_check(CheckKind.SLICE, library.resolve("trefoil"), "trefoil", [2], {})
        assert verdict.status is Status.OBSTRUCTED
        assert verdict.failures

    def test_no_metabolizer_obstructs_without_d_data(self):
        H = two_bridge_group(3, 1)
        verdict = slice_check(H, DBar(H, ()))
        assert verdict.status is Status.OBSTRUCTED
        assert verdict.failures[0].reason.startswith("no ")

    def test_stevedore_not_obstructed(self, library):
        verdict = run_check(CheckKind.SLICE, library.resolve("stevedore"), "stevedore", [2], {})
        assert verdict.status is Status.NOT_OBSTRUCTED
        assert [w.generators for w in verdict.witnesses] == [[[3]]]
        values = {tuple(v.element): v for v in verdict.dbar}
        assert values[(3,)].kind is EntryKind.EXACT and values[(3,)].value == "0"
        assert values[(6,)].value == "0"

    def test_unknot_trivially_not_obstructed(self, library):
        for q in (2, 3, 5):
            verdict = run_check(CheckKind.SLICE, library.resolve("unknot"), "unknot", [q], {})
            assert verdict.status is Status.NOT_OBSTRUCTED
            assert verdict.group.invariant_factors == []

    def test_unknown_data_is_inconclusive(self, z7_squared):
        verdict = slice_check(z7_squared, DBar(z7_squared, (), DEntry.exact(0, "slice")))
        assert verdict.status is Status.INCONCLUSIVE
        assert verdict.blocking

    def test_certified_nonzero_basepoint(self, z7_squared):
        verdict = slice_check(z7_squared, DBar(z7_squared, (), DEntry.exact(Fraction(1, 2), "x")))
        assert verdict.status is Status.OBSTRUCTED


@pytest.mark.unit
class TestDoublyVanishing:
    def test_satellite_q3_obstructed(self, library, sources):
        verdict = run_check(CheckKind.DOUBLY_VANISHING, library.resolve("K"), "K", [3], sources)
        assert verdict.status is Status.OBSTRUCTED
        assert verdict.group.invariant_factors == [7, 7]
        assert len(verdict.pairs) == 1
        assert verdict.failures[0].element.element == [1, 0]
        assert verdict.failures[0].element.relation is Relation.LE
        assert any("Cochran-Harvey-Horn" in p for p in verdict.provenance)

    def test_no_d_data_inconclusive(self, library):
        verdict = run_check(CheckKind.DOUBLY_VANISHING, library.resolve("K946"), "K946", [3], {})
        assert verdict.status is Status.INCONCLUSIVE
        assert verdict.blocking

    def test_vanishing_data_not_obstructed(self, z7_squared):
        db = zero_dbar(z7_squared)
        verdict = doubly_vanishing_check(z7_squared, db)
        assert verdict.status is Status.NOT_OBSTRUCTED
        assert len(verdict.pairs) == 1
        assert slice_check(z7_squared, db).status is Status.NOT_OBSTRUCTED

    @pytest.mark.parametrize("value", [0, Fraction(2, 9), -1])
    def test_cyclic_nine_obstructed_for_any_d_data(self, value):
        H = two_bridge_group(9, 2)
        entries = tuple(((k,), DEntry.exact(value, "any")) for k in range(1, 9))
        verdict = doubly_vanishing_check(H, DBar(H, entries, DEntry.exact(0, "any")))
        assert verdict.status is Status.OBSTRUCTED
        assert verdict.failures[0].reason == "no metabolizer pair exists"

    def test_stevedore_doubly_vanishing_obstructed(self, library):
        verdict = run_check(CheckKind.DOUBLY_VANISHING, library.resolve("stevedore"), "stevedore", [2], {})
        assert verdict.status is Status.OBSTRUCTED

    def test_filling_unknowns_keeps_obstruction(self, library, sources):
        H, table = expression_cover(library.resolve("K"), 3, sources)
        db = dbar(table)
        assert doubly_vanishing_check(H, db).status is Status.OBSTRUCTED
        known = db.as_dict()
        for fill in (0, Fraction(3, 7), -2):
            entries = tuple(
                (x, known.get(x, DEntry.exact(fill, "fill"))) for x in H.elements() if x != H.zero
            )
            assert doubly_vanishing_check(H, DBar(H, entries, db.basepoint)).status is Status.OBSTRUCTED

    def test_mode_defaults(self, library):
        expr = library.resolve("stevedore")
        assert run_check(CheckKind.SLICE, expr, "s", [2], {}).lambda_invariant is True
        assert run_check(CheckKind.DOUBLY_VANISHING, expr, "s", [2], {}).lambda_invariant is False
        assert run_check(CheckKind.DOUBLY_SLICE, expr, "s", [2], {}).lambda_invariant is True

    def test_multiple_q_aggregate(self, library, sources):
        verdict = run_check(CheckKind.DOUBLY_VANISHING, library.resolve("K"), "K", [2, 3], sources)
        assert verdict.status is Status.OBSTRUCTED
        assert [p.q for p in verdict.parts] == [2, 3]
        assert [p.status for p in verdict.parts] == [Status.INCONCLUSIVE, Status.OBSTRUCTED]


@pytest.mark.unit
class TestExpressionCover:
    def test_mirror_negates_form_and_table(self):
        from dslice.knots import Leaf, Mirror

        leaf = Leaf("trefoil", TwoBridge(3, 1))
        H, table = expression_cover(Mirror(leaf), 2, {})
        assert H.gram == ((Fraction(1, 3),),)
        assert table.basepoint.value == Fraction(-1, 2)

    def test_repeated_summand(self, library):
        H, table = expression_cover(library.expression("2trefoil"), 2, {})
        assert H.invariant_factors == (3, 3)
        assert table.basepoint.value == 1

    def test_fact_records_have_no_cover(self, library):
        with pytest.raises(InvalidExpressionError):
            expression_cover(library.resolve("K_3"), 2, {})

    def test_stevedore_basepoint_vanishes(self):
        table = two_bridge_dtable(TwoBridge(9, 2))
        assert table.basepoint.is_exact_zero


@pytest.mark.unit
class TestSplit:
    def test_satellite_minus_k3_obstructed(self, library, sources):
        verdict = split_doubly_slice(library.expression("K + (-1)K_3"), [2, 3], sources, knot="K + (-1)K_3")
        assert verdict.status is Status.OBSTRUCTED
        assert len(verdict.certificates) == 1
        cert = verdict.certificates[0]
        left, right = poly_from_map(cert.left_alexander), poly_from_map(cert.right_alexander)
        product = poly_from_map(cert.f1) * left + poly_from_map(cert.f2) * right
        assert product == LaurentPoly.constant(cert.c)
        assert {part.knot for part in verdict.parts} == {"K", "-K_3"}
        assert any("Meier" in p for p in verdict.provenance)

    def test_three_classes_with_facts(self, library):
        verdict = split_doubly_slice(library.expression("K + K_3 + K_5"), [2], {})
        assert verdict.status is Status.OBSTRUCTED
        assert len(verdict.certificates) == 6
        assert verdict.orders["K_3 q=2"] == 9 and verdict.orders["K_5 q=2"] == 25

    def test_same_summand_inconclusive(self, library):
        verdict = split_doubly_slice(library.expression("trefoil + trefoil"), [2], {})
        assert verdict.status is Status.INCONCLUSIVE
        assert verdict.coprime_failures
        assert not verdict.parts

    def test_no_cover_work_without_coprimality(self, library, mocker):
        spy = mocker.spy(obstruct, "summand_verdict")
        split_doubly_slice(library.expression("trefoil + trefoil"), [2], {})
        assert spy.call_count == 0

    def test_needs_two_classes(self, library):
        with pytest.raises(NotEnoughSummandsError):
            split_doubly_slice(library.resolve("K"), [3], {})

    def test_fact_with_multiplicity_is_inconclusive(self, library):
        verdict = split_doubly_slice(library.expression("K946 + 2K_3"), [2], {})
        classes = {part.knot: part for part in verdict.parts}
        assert classes["(2)K_3"].status is Status.INCONCLUSIVE


@pytest.mark.unit
class TestVerify:
    def test_round_trip(self, library, sources):
        verdicts = [
            run_check(CheckKind.DOUBLY_VANISHING, library.resolve("K"), "K", [2, 3], sources),
            run_check(CheckKind.SLICE, library.resolve("stevedore"), "stevedore", [2], {}),
            split_doubly_slice(library.expression("K + (-1)K_3"), [2, 3], sources),
        ]
        for verdict in verdicts:
            assert verify(parse_verdict(render_json(verdict))) == []

    def test_tampered_status(self, library, sources):
        verdict = run_check(CheckKind.DOUBLY_VANISHING, library.resolve("K"), "K", [3], sources)
        verdict.status = Status.NOT_OBSTRUCTED
        problems = verify(parse_verdict(render_json(verdict)))
        assert any("re-run gives OBSTRUCTED" in p for p in problems)

    def test_tampered_certificate(self, library, sources):
        verdict = split_doubly_slice(library.expression("K + (-1)K_3"), [2, 3], sources)
        verdict.certificates[0].c += 1
        assert any("Bezout" in p for p in verify(verdict))

    def test_dropped_certificate(self, library):
        verdict = split_doubly_slice(library.expression("K + K_3 + K_5"), [2], {})
        assert verify(verdict) == []
        verdict.certificates = verdict.certificates[:1]
        assert any("1 coprimality checks reported, 6 required" in p for p in verify(verdict))

    def test_substituted_operands(self, library):
        verdict = split_doubly_slice(library.expression("K + K_3 + K_5"), [2], {})
        one = {"0": "1"}
        verdict.certificates[0] = verdict.certificates[0].model_copy(
            update=dict(left_alexander=one, right_alexander=one, f1=one, f2={}, c=1)
        )
        assert any("not about the summand classes" in p for p in verify(verdict))

    def test_classes_recomputed_from_expression(self, library):
        expr = library.expression("K + (-1)K_3")
        verdict = split_doubly_slice(expr, [2], {})
        assert verify(verdict, expr=expr) == []
        verdict.classes[1].alexander = {"0": "1"}
        assert verify(verdict) != []
        assert any("differ from the expression" in p for p in verify(verdict, expr=expr))

    def test_reported_failure_must_be_genuine(self, library):
        verdict = split_doubly_slice(library.expression("K + K"), [2], {})
        assert verdict.status is Status.INCONCLUSIVE
        assert verify(verdict) == []
        verdict.classes[1].alexander = {"0": "1"}
        assert any("reported not coprime but are coprime" in p for p in verify(verdict))
