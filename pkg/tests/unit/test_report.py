"""
Unit tests for verdict reports: JSON round trips and text rendering.
"""

import json
from fractions import Fraction

import pytest

from dslice.covers import two_bridge_group
from dslice.dinv import DEntry, Relation
from dslice.laurent import LaurentPoly
from dslice.obstruct import run_check, split_doubly_slice
from dslice.report import (
    CheckKind,
    Status,
    dvalue,
    entry_from_dvalue,
    group_data,
    group_from_data,
    parse_verdict,
    poly_from_map,
    poly_to_map,
    render,
    render_json,
    render_text,
)


@pytest.mark.unit
class TestDataConversion:
    def test_group_round_trip(self):
        H = two_bridge_group(9, 2)
        data = group_data(H)
        assert data.gram == [["7/9"]]
        assert group_from_data(data) == H

    def test_poly_map(self):
        p = LaurentPoly.from_dict({0: 2, 1: -5, 2: 2})
        mapping = poly_to_map(p)
        assert mapping == {"0": "2", "1": "-5", "2": "2"}
        assert poly_from_map(mapping) == p

    @pytest.mark.parametrize(
        "entry",
        [
            DEntry.exact(Fraction(-2, 3), "lens"),
            DEntry.bound(Relation.LE, Fraction(-3, 2), "imported"),
            DEntry.bound(Relation.NE, 0, "imported"),
            DEntry.unknown(),
        ],
    )
    def test_entry_round_trip(self, entry):
        assert entry_from_dvalue(dvalue((1, 0), entry)) == entry


@pytest.mark.unit
class TestRendering:
    def test_json_is_stable(self, library):
        verdict = run_check(CheckKind.SLICE, library.resolve("stevedore"), "stevedore", [2], {})
        text = render_json(verdict)
        assert render_json(parse_verdict(text)) == text
        payload = json.loads(text)
        assert payload["status"] == "NOT_OBSTRUCTED"
        assert payload["check"] == "slice"
        assert payload["group"]["invariant_factors"] == [9]

    def test_text_obstructed(self, library):
        verdict = run_check(CheckKind.SLICE, library.resolve("trefoil"), "trefoil", [2], {})
        text = render_text(verdict)
        assert text.splitlines()[0].startswith("[OBSTRUCTED] slice trefoil q=2")
        assert "group: Z/3" in text
        assert "basepoint d(s0): 1/2" in text
        assert "conventions:" in text

    def test_text_lists_blocking_entries(self, library):
        verdict = run_check(CheckKind.DOUBLY_VANISHING, library.resolve("K946"), "K946", [3], {})
        text = render(verdict, "text")
        assert "[INCONCLUSIVE]" in text
        assert "unknown entries blocking a decision:" in text

    def test_text_split(self, library):
        verdict = split_doubly_slice(library.expression("K + (-1)K_3"), [2], {}, knot="K + (-1)K_3")
        text = render_text(verdict)
        assert text.startswith("[OBSTRUCTED] split K + (-1)K_3")
        assert "Bezout certificates:" in text
        assert "|H_1| -K_3 q=2: 9" in text
        assert "imported: Meier, Corollary 5.2" in text

    def test_coprime_failure_text(self, library):
        verdict = split_doubly_slice(library.expression("trefoil + trefoil"), [2], {})
        assert verdict.status is Status.INCONCLUSIVE
        assert "coprimality fails:" in render_text(verdict)

    def test_render_dispatch(self, library):
        verdict = run_check(CheckKind.SLICE, library.resolve("unknot"), "unknot", [2], {})
        assert render(verdict, "json").startswith("{")
        assert render(verdict, "text").startswith("[NOT_OBSTRUCTED]")
