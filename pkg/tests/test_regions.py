from fractions import Fraction

import pytest

from trace_convexity.errors import DomainError
from trace_convexity.functionals import ParamPoint, TripleParams
from trace_convexity.regions import (
    TAG_ANDO_S1,
    TAG_CONVEXITY_NECESSARY,
    TAG_LARGE_S,
    TAG_NEGATIVE_EXPONENTS,
    TAG_NEGATIVE_EXPONENTS_S1,
    TAG_OPEN_MIXED,
    TAG_OPEN_NEGATIVE,
    TAG_P2_OPTIMAL,
    RegionStatus,
    classify,
    classify_concavity,
    classify_convexity,
    classify_epstein,
    classify_monotone_chain,
    classify_operator_map,
    classify_scalar,
    classify_triple,
)


@pytest.mark.parametrize(
    "p, q, s, status, tag",
    [
        ("2", "-1/2", "2/3", RegionStatus.PROVEN_CONVEX, TAG_P2_OPTIMAL),
        ("-1/2", "2", "2/3", RegionStatus.PROVEN_CONVEX, TAG_P2_OPTIMAL),
        ("1", "-1/2", "2", RegionStatus.PROVEN_CONVEX, TAG_LARGE_S),
        ("3/2", "-1/4", "1", RegionStatus.PROVEN_CONVEX, TAG_ANDO_S1),
        ("3/2", "-1/4", "0.9", RegionStatus.OPEN_CONVEXITY, TAG_OPEN_MIXED),
        ("-1/2", "-1/2", "1", RegionStatus.PROVEN_CONVEX, TAG_NEGATIVE_EXPONENTS),
        ("-1", "-1", "1/2", RegionStatus.PROVEN_CONVEX, TAG_NEGATIVE_EXPONENTS),
        ("-1", "-1", "1", RegionStatus.PROVEN_CONVEX, TAG_NEGATIVE_EXPONENTS_S1),
        ("-1", "-1", "2", RegionStatus.OPEN_CONVEXITY, TAG_OPEN_NEGATIVE),
        ("1/2", "1/2", "1", RegionStatus.PROVEN_NOT_CONVEX, TAG_CONVEXITY_NECESSARY),
        ("3", "-1/2", "1", RegionStatus.PROVEN_NOT_CONVEX, TAG_CONVEXITY_NECESSARY),
        ("2", "-1/2", "1/2", RegionStatus.PROVEN_NOT_CONVEX, TAG_CONVEXITY_NECESSARY),
    ],
)
def test_convexity(p, q, s, status, tag):
    verdict = classify_convexity(ParamPoint.parse(p, q, s))
    assert verdict.status is status
    assert verdict.justification == tag


@pytest.mark.parametrize(
    "p, q, s, status",
    [
        ("1", "1", "1/2", RegionStatus.PROVEN_CONCAVE),
        ("1/2", "1/2", "1", RegionStatus.PROVEN_CONCAVE),
        ("1/4", "1/2", "0.3", RegionStatus.PROVEN_CONCAVE),
        ("1", "1", "3/4", RegionStatus.PROVEN_NOT_CONCAVE),
        ("3/2", "1/2", "1/4", RegionStatus.PROVEN_NOT_CONCAVE),
        ("-1/2", "1/2", "1", RegionStatus.PROVEN_NOT_CONCAVE),
    ],
)
def test_concavity(p, q, s, status):
    assert classify_concavity(ParamPoint.parse(p, q, s)).status is status


def test_rational_boundary_is_exact():
    below = ParamPoint(Fraction(2), Fraction(-1, 2), Fraction(2, 3) - Fraction(1, 10**15))
    assert classify_convexity(below).status is RegionStatus.PROVEN_NOT_CONVEX
    assert classify_convexity(ParamPoint.parse("2", "-1/2", "2/3")).is_proven_positive


def test_float_boundary_is_tolerant():
    near = ParamPoint(2.0, -0.5, 2.0 / 3.0 - 1e-15)
    assert classify_convexity(near).status is RegionStatus.PROVEN_CONVEX


def test_classify_pairs_both_properties():
    pair = classify(ParamPoint.parse("1/2", "1/2", "1"))
    assert pair.convexity.is_proven_negative
    assert pair.concavity.is_proven_positive
    assert pair.to_dict()["concavity"] == {
        "status": "proven_concave",
        "justification": "concavity-iff",
    }


class TestOperatorMap:
    def test_convex_iff(self):
        assert classify_operator_map(-1, 2).convexity.status is RegionStatus.PROVEN_CONVEX
        assert classify_operator_map(Fraction(-1, 2), 2).convexity.is_proven_positive
        assert classify_operator_map(-1, 1.9).convexity.status is RegionStatus.PROVEN_NOT_CONVEX
        assert classify_operator_map(-1.5, 2).convexity.is_proven_negative

    def test_never_concave(self):
        pair = classify_operator_map(0.5, 0.25)
        assert pair.concavity.status is RegionStatus.PROVEN_NOT_CONCAVE

    def test_zero_exponent(self):
        with pytest.raises(DomainError):
            classify_operator_map(0, 2)


class TestTriple:
    def test_convex_iff(self):
        pair = classify_triple(TripleParams(Fraction(-1, 2), 2, Fraction(-1, 4)))
        assert pair.convexity.status is RegionStatus.PROVEN_CONVEX
        assert pair.concavity.status is RegionStatus.PROVEN_NOT_CONCAVE

    def test_sum_below_minus_one(self):
        pair = classify_triple(TripleParams(-1, 2, Fraction(-1, 2)))
        assert pair.convexity.status is RegionStatus.PROVEN_NOT_CONVEX


class TestScalar:
    @pytest.mark.parametrize("p, q", [(2, -1), (-1, 2), (-0.5, -0.5), (1, 0)])
    def test_convex(self, p, q):
        assert classify_scalar(p, q).convexity.is_proven_positive

    @pytest.mark.parametrize("p, q", [(0.5, 0.5), (0.25, 0.5), (1, 0)])
    def test_concave(self, p, q):
        assert classify_scalar(p, q).concavity.is_proven_positive

    def test_neither(self):
        pair = classify_scalar(2, 1)
        assert pair.convexity.is_proven_negative
        assert pair.concavity.is_proven_negative


class TestEpstein:
    def test_concave_up_to_reciprocal(self):
        assert classify_epstein(Fraction(1, 2), 2).concavity.status is RegionStatus.PROVEN_CONCAVE
        assert classify_epstein(Fraction(1, 2), 3).concavity.status is RegionStatus.OPEN_CONVEXITY

    def test_convexity_is_not_encoded(self):
        assert classify_epstein(1, 1).convexity.status is RegionStatus.OPEN_CONVEXITY

    @pytest.mark.parametrize("t, u", [(0, 1), (1.5, 1), (0.5, 0)])
    def test_domain(self, t, u):
        with pytest.raises(DomainError):
            classify_epstein(t, u)


def test_monotone_chain_region():
    assert classify_monotone_chain(Fraction(-1, 2), 1).convexity.is_proven_positive
    assert classify_monotone_chain(-1, 3).convexity.is_proven_positive
    assert classify_monotone_chain(-2, 1).convexity.status is RegionStatus.OPEN_CONVEXITY
    assert classify_monotone_chain(Fraction(-1, 2), Fraction(1, 2)).convexity.status is (
        RegionStatus.OPEN_CONVEXITY
    )


EXPONENTS = ["-2", "-1", "-1/2", "-1/4", "1/4", "1/2", "1", "3/2", "2", "3"]
POWERS = ["1/4", "1/2", "2/3", "1", "3/2", "2", "5"]


def _grid():
    for p in EXPONENTS:
        for q in EXPONENTS:
            for s in POWERS:
                yield ParamPoint.parse(p, q, s)


def test_classification_is_swap_symmetric():
    for params in _grid():
        swapped = params.swapped()
        assert classify_convexity(params) == classify_convexity(swapped), params
        assert classify_concavity(params) == classify_concavity(swapped), params


def test_classification_is_total():
    convexity_states = {
        RegionStatus.PROVEN_CONVEX,
        RegionStatus.PROVEN_NOT_CONVEX,
        RegionStatus.OPEN_CONVEXITY,
    }
    concavity_states = {RegionStatus.PROVEN_CONCAVE, RegionStatus.PROVEN_NOT_CONCAVE}
    for params in _grid():
        pair = classify(params)
        assert pair.convexity.status in convexity_states, params
        assert pair.concavity.status in concavity_states, params
        assert pair.convexity.justification
        assert not (pair.convexity.is_proven_positive and pair.concavity.is_proven_positive)
