"""
Unit tests for knot descriptors, sum expressions and coprimality.
"""

import pytest

from dslice.errors import BadFractionError, InvalidAlexanderError, InvalidExpressionError, NotEnoughSummandsError
from dslice.knots import (
    CoverFact,
    FactRecord,
    Leaf,
    Mirror,
    SeifertMatrix,
    Sum,
    TwoBridge,
    alexander,
    class_label,
    connected_sum,
    even_continued_fraction,
    mirror,
    pairwise_coprime,
    parse_expression,
    parse_terms,
    signed_leaves,
    summand_classes,
)
from dslice.laurent import LaurentPoly, cyclotomic, normalize


def P(*coeffs) -> LaurentPoly:
    return LaurentPoly.from_coefficients(list(coeffs))


def fact_leaf(name: str, p: int) -> Leaf:
    delta = normalize(cyclotomic(2 * p) ** 2)
    return Leaf(name, FactRecord(name, delta, (CoverFact(2, (p, p), False, "imported"),)))


@pytest.mark.unit
class TestSeifertMatrix:
    def test_genus_and_alexander(self, k946):
        assert k946.genus == 1
        assert k946.alexander() == P(2, -5, 2)

    def test_connected_sum_multiplies_alexander(self, k946, trefoil_matrix):
        total = connected_sum(k946, trefoil_matrix)
        assert total.V.rows == 4
        assert total.alexander() == normalize(P(2, -5, 2) * P(1, -1, 1))

    def test_mirror_keeps_alexander(self, trefoil_matrix):
        assert mirror(trefoil_matrix).alexander() == trefoil_matrix.alexander()
        assert mirror(trefoil_matrix).V == -trefoil_matrix.V.transpose()


@pytest.mark.unit
class TestTwoBridge:
    def test_even_continued_fraction(self):
        assert even_continued_fraction(9, 2) == (4, -2)
        assert even_continued_fraction(3, -2) == (-2, -2)

    @pytest.mark.parametrize(
        "p,q,expected",
        [(3, 1, P(1, -1, 1)), (9, 2, P(2, -5, 2)), (5, 2, P(1, -3, 1)), (5, 1, P(1, -1, 1, -1, 1))],
    )
    def test_alexander(self, p, q, expected):
        assert TwoBridge(p, q).alexander() == expected

    def test_determinant_is_p(self):
        for p, q in [(3, 1), (5, 2), (7, 2), (7, 3), (9, 2), (11, 4), (13, 5)]:
            assert abs(TwoBridge(p, q).alexander().evaluate(-1)) == p

    def test_stevedore_seifert(self):
        assert TwoBridge(9, 2).seifert().V.to_lists() == [[2, 1], [0, -1]]

    def test_unknot(self):
        assert TwoBridge(1, 0).seifert().V.rows == 0
        assert TwoBridge(1, 0).alexander() == LaurentPoly.constant(1)

    @pytest.mark.parametrize("p,q", [(4, 1), (9, 3), (3, 0), (3, 4), (1, 1), (-3, 1)])
    def test_invalid_fraction(self, p, q):
        with pytest.raises(BadFractionError):
            TwoBridge(p, q)

    def test_mirrored(self):
        assert TwoBridge(9, 2, "stevedore").mirrored() == TwoBridge(9, 7, "-stevedore")


@pytest.mark.unit
class TestFactRecord:
    def test_requires_alexander_normalization(self):
        with pytest.raises(InvalidAlexanderError):
            FactRecord("bad", P(1, 1))

    def test_fact_lookup(self):
        leaf = fact_leaf("K_3", 3)
        assert leaf.knot.fact_at(2).invariant_factors == (3, 3)
        assert leaf.knot.fact_at(3) is None


@pytest.mark.unit
class TestExpressions:
    def test_parse_terms(self):
        assert parse_terms("K + (-1)K_3") == [("K", 1), ("K_3", -1)]
        assert parse_terms("2K - K_5") == [("K", 2), ("K_5", -1)]
        assert parse_terms("K + 3*K_7") == [("K", 1), ("K_7", 3)]
        assert parse_terms("-trefoil") == [("trefoil", -1)]

    @pytest.mark.parametrize("text", ["", "K K_3", "K + ", "0K", "K + (0)K_3", "K + %"])
    def test_parse_rejects(self, text):
        with pytest.raises(InvalidExpressionError):
            parse_terms(text)

    def test_parse_expression_single_name_is_the_leaf(self, k946):
        leaf = Leaf("K946", k946)
        assert parse_expression("K946", lambda name: leaf) is leaf

    def test_signed_leaves_and_classes(self, k946, trefoil_matrix):
        a, b = Leaf("A", k946), Leaf("B", trefoil_matrix)
        expr = Sum(((a, 1), (Mirror(b), 2), (a, 2), (b, 1)))
        assert signed_leaves(expr) == [(a, 1), (b, -2), (a, 2), (b, 1)]
        assert summand_classes(expr) == [(a, 3), (b, -2), (b, 1)]

    def test_k_and_minus_k_stay_separate(self, k946):
        a = Leaf("A", k946)
        assert summand_classes(Sum(((a, 1), (a, -1)))) == [(a, 1), (a, -1)]

    def test_class_label(self, k946):
        a = Leaf("A", k946)
        assert class_label(a, 1) == "A"
        assert class_label(a, -1) == "-A"
        assert class_label(a, 3) == "(3)A"

    def test_alexander_of_sum(self, k946):
        expr = Sum(((Leaf("K", k946), 1), (fact_leaf("K_3", 3), -1)))
        assert alexander(expr) == normalize(P(2, -5, 2) * cyclotomic(6) ** 2)


@pytest.mark.unit
class TestCoprimality:
    def test_pairwise_coprime(self, k946):
        leaves = [Leaf("K", k946), fact_leaf("K_3", 3), fact_leaf("K_5", 5), fact_leaf("K_7", 7)]
        result = pairwise_coprime(leaves)
        assert result.ok
        assert len(result.certificates) == 6
        for (i, j), cert in result.certificates.items():
            assert cert.verify(alexander(leaves[i]), alexander(leaves[j]))

    def test_same_summand_fails(self):
        result = pairwise_coprime([fact_leaf("K_3", 3), fact_leaf("K_3'", 3)])
        assert not result.ok
        assert result.failures[(0, 1)] == normalize(cyclotomic(6) ** 2)

    def test_needs_two(self, k946):
        with pytest.raises(NotEnoughSummandsError):
            pairwise_coprime([Leaf("K", k946)])
