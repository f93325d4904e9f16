"""
Known convexity/concavity status of the trace functional, the sandwich map,
the triple trace and the scalar map over their exponent spaces.

Boundaries are compared exactly when every exponent is a Fraction and with
an absolute tolerance of 1e-12 otherwise.
"""

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterable, Union

from .errors import DomainError
from .functionals import Exponent, ParamPoint, TripleParams

BOUNDARY_TOL = 1e-12

Number = Union[float, Fraction]


class RegionStatus(str, Enum):
    PROVEN_CONVEX = "proven_convex"
    PROVEN_CONCAVE = "proven_concave"
    PROVEN_NOT_CONVEX = "proven_not_convex"
    PROVEN_NOT_CONCAVE = "proven_not_concave"
    OPEN_CONVEXITY = "open_convexity"


# Justification tags
TAG_P2_OPTIMAL = "p2-optimal-range"
TAG_LARGE_S = "large-s"
TAG_ANDO_S1 = "ando-s1"
TAG_NEGATIVE_EXPONENTS = "negative-exponents"
TAG_NEGATIVE_EXPONENTS_S1 = "negative-exponents-s1"
TAG_CONVEXITY_NECESSARY = "hiai-necessary"
TAG_OPEN_MIXED = "open-mixed-exponents"
TAG_OPEN_NEGATIVE = "open-negative-exponents"
TAG_CONCAVITY_IFF = "concavity-iff"
TAG_OPERATOR_CONVEX_IFF = "operator-convex-iff"
TAG_OPERATOR_NEVER_CONCAVE = "operator-never-concave"
TAG_TRIPLE_CONVEX_IFF = "triple-convex-iff"
TAG_TRIPLE_NEVER_CONCAVE = "triple-never-concave"
TAG_SCALAR_CONVEX_IFF = "scalar-convex-iff"
TAG_SCALAR_CONCAVE_IFF = "scalar-concave-iff"
TAG_EPSTEIN_CONCAVE = "epstein-concave"
TAG_OPEN_EPSTEIN = "open-epstein"
TAG_MONOTONE_CHAIN = "monotone-chain"


@dataclass(frozen=True)
class RegionVerdict:
    """Status of one property at one exponent point, with its justification tag"""

    status: RegionStatus
    justification: str

    @property
    def is_proven_positive(self) -> bool:
        """True when the property is proven to hold (no violation may ever be found)"""
        return self.status in (RegionStatus.PROVEN_CONVEX, RegionStatus.PROVEN_CONCAVE)

    @property
    def is_proven_negative(self) -> bool:
        return self.status in (
            RegionStatus.PROVEN_NOT_CONVEX,
            RegionStatus.PROVEN_NOT_CONCAVE,
        )

    def to_dict(self) -> Dict[str, str]:
        return {"status": self.status.value, "justification": self.justification}


@dataclass(frozen=True)
class RegionPair:
    """Convexity and concavity verdicts of the same map"""

    convexity: RegionVerdict
    concavity: RegionVerdict

    def to_dict(self) -> Dict[str, Dict[str, str]]:
        return {"convexity": self.convexity.to_dict(), "concavity": self.concavity.to_dict()}


class _Arithmetic:
    """Comparisons that are exact on Fractions and tolerant on floats"""

    def __init__(self, values: Iterable[Exponent]):
        values = list(values)
        self.exact = all(isinstance(v, Fraction) for v in values)
        self.values = [v if self.exact else float(v) for v in values]

    def _tol(self, b: Number) -> float:
        if self.exact or math.isinf(b):
            return 0.0
        return BOUNDARY_TOL * max(1.0, abs(b))

    def ge(self, a: Number, b: Number) -> bool:
        return a >= b - self._tol(b)

    def le(self, a: Number, b: Number) -> bool:
        return a <= b + self._tol(b)

    def gt(self, a: Number, b: Number) -> bool:
        return a > b + self._tol(b)

    def lt(self, a: Number, b: Number) -> bool:
        return a < b - self._tol(b)

    def eq(self, a: Number, b: Number) -> bool:
        return abs(a - b) <= self._tol(b)

    def inv(self, x: Number) -> Number:
        """1/x with 1/0 read as +infinity"""
        if x == 0:
            return math.inf
        return Fraction(1) / x if self.exact else 1.0 / x

    def within(self, x: Number, lo: Number, hi: Number) -> bool:
        return self.ge(x, lo) and self.le(x, hi)


def _in_mixed_box(ar: _Arithmetic, pp: Number, qq: Number) -> bool:
    """pp in [1, 2] and qq in [-1, 0)"""
    return ar.within(pp, 1, 2) and ar.ge(qq, -1) and ar.lt(qq, 0)


def _classify_mixed(ar: _Arithmetic, pp: Number, qq: Number, s: Number) -> RegionVerdict:
    # Strongest statement first
    if ar.eq(pp, 2) and ar.ge(s, ar.inv(2 + qq)):
        return RegionVerdict(RegionStatus.PROVEN_CONVEX, TAG_P2_OPTIMAL)
    if ar.ge(s, min(ar.inv(pp - 1), ar.inv(1 + qq))):
        return RegionVerdict(RegionStatus.PROVEN_CONVEX, TAG_LARGE_S)
    if ar.eq(s, 1):
        return RegionVerdict(RegionStatus.PROVEN_CONVEX, TAG_ANDO_S1)
    return RegionVerdict(RegionStatus.OPEN_CONVEXITY, TAG_OPEN_MIXED)


def classify_convexity(params: ParamPoint) -> RegionVerdict:
    """
    Joint convexity status of (A, B) -> Tr[(A^{q/2} B^p A^{q/2})^s].

    Convexity can only hold for p in [1, 2], q in [-1, 0), s >= 1/(p+q)
    (or p and q swapped), or for -1 <= p, q < 0; everything else is
    proven_not_convex.
    """
    ar = _Arithmetic((params.p, params.q, params.s))
    p, q, s = ar.values

    for pp, qq in ((p, q), (q, p)):
        if _in_mixed_box(ar, pp, qq) and ar.ge(s, ar.inv(pp + qq)):
            return _classify_mixed(ar, pp, qq, s)

    if ar.ge(p, -1) and ar.lt(p, 0) and ar.ge(q, -1) and ar.lt(q, 0):
        if ar.ge(s, Fraction(1, 2) if ar.exact else 0.5) and ar.le(s, -ar.inv(p + q)):
            return RegionVerdict(RegionStatus.PROVEN_CONVEX, TAG_NEGATIVE_EXPONENTS)
        if ar.eq(s, 1):
            return RegionVerdict(RegionStatus.PROVEN_CONVEX, TAG_NEGATIVE_EXPONENTS_S1)
        return RegionVerdict(RegionStatus.OPEN_CONVEXITY, TAG_OPEN_NEGATIVE)

    return RegionVerdict(RegionStatus.PROVEN_NOT_CONVEX, TAG_CONVEXITY_NECESSARY)


def classify_concavity(params: ParamPoint) -> RegionVerdict:
    """Jointly concave iff 0 < p, q <= 1 and s <= 1/(p+q)"""
    ar = _Arithmetic((params.p, params.q, params.s))
    p, q, s = ar.values
    concave = (
        ar.gt(p, 0)
        and ar.le(p, 1)
        and ar.gt(q, 0)
        and ar.le(q, 1)
        and ar.le(s, ar.inv(p + q))
    )
    status = RegionStatus.PROVEN_CONCAVE if concave else RegionStatus.PROVEN_NOT_CONCAVE
    return RegionVerdict(status, TAG_CONCAVITY_IFF)


def classify(params: ParamPoint) -> RegionPair:
    return RegionPair(classify_convexity(params), classify_concavity(params))


def classify_operator_map(p: Exponent, q: Exponent) -> RegionPair:
    """(A, B) -> A^{q/2} B^p A^{q/2}: operator convex iff q = 2 and -1 <= p < 0, never concave"""
    if p == 0 or q == 0:
        raise DomainError(f"p and q must be nonzero, got p={p}, q={q}")
    ar = _Arithmetic((p, q))
    p, q = ar.values
    convex = ar.eq(q, 2) and ar.ge(p, -1) and ar.lt(p, 0)
    return RegionPair(
        RegionVerdict(
            RegionStatus.PROVEN_CONVEX if convex else RegionStatus.PROVEN_NOT_CONVEX,
            TAG_OPERATOR_CONVEX_IFF,
        ),
        RegionVerdict(RegionStatus.PROVEN_NOT_CONCAVE, TAG_OPERATOR_NEVER_CONCAVE),
    )


def classify_triple(t: TripleParams) -> RegionPair:
    """Tr[A^{q/2} B^p A^{q/2} C^r]: convex iff q = 2, p, r < 0, -1 <= p + r < 0; never concave"""
    ar = _Arithmetic((t.p, t.q, t.r))
    p, q, r = ar.values
    convex = ar.eq(q, 2) and ar.lt(p, 0) and ar.lt(r, 0) and ar.ge(p + r, -1)
    return RegionPair(
        RegionVerdict(
            RegionStatus.PROVEN_CONVEX if convex else RegionStatus.PROVEN_NOT_CONVEX,
            TAG_TRIPLE_CONVEX_IFF,
        ),
        RegionVerdict(RegionStatus.PROVEN_NOT_CONCAVE, TAG_TRIPLE_NEVER_CONCAVE),
    )


def classify_scalar(p: Exponent, q: Exponent) -> RegionPair:
    """
    (a, b) -> a^q b^p on (0, inf)^2.

    Convex iff (p >= 1, q <= 0, p + q >= 1), or the same with p and q
    swapped, or p, q <= 0. Concave iff 0 <= p, q <= 1 and p + q <= 1.
    """
    ar = _Arithmetic((p, q))
    p, q = ar.values
    convex = (
        (ar.ge(p, 1) and ar.le(q, 0) and ar.ge(p + q, 1))
        or (ar.ge(q, 1) and ar.le(p, 0) and ar.ge(p + q, 1))
        or (ar.le(p, 0) and ar.le(q, 0))
    )
    concave = ar.within(p, 0, 1) and ar.within(q, 0, 1) and ar.le(p + q, 1)
    return RegionPair(
        RegionVerdict(
            RegionStatus.PROVEN_CONVEX if convex else RegionStatus.PROVEN_NOT_CONVEX,
            TAG_SCALAR_CONVEX_IFF,
        ),
        RegionVerdict(
            RegionStatus.PROVEN_CONCAVE if concave else RegionStatus.PROVEN_NOT_CONCAVE,
            TAG_SCALAR_CONCAVE_IFF,
        ),
    )


def classify_epstein(t: Exponent, u: Exponent) -> RegionPair:
    """A -> Tr[(D A^t D)^u]: concave for 0 < t <= 1 and 0 < u <= 1/t; convexity is not encoded"""
    ar = _Arithmetic((t, u))
    t, u = ar.values
    if not (ar.gt(t, 0) and ar.le(t, 1) and ar.gt(u, 0)):
        raise DomainError(f"Need 0 < t <= 1 and u > 0, got t={t}, u={u}")
    open_verdict = RegionVerdict(RegionStatus.OPEN_CONVEXITY, TAG_OPEN_EPSTEIN)
    concave = RegionVerdict(RegionStatus.PROVEN_CONCAVE, TAG_EPSTEIN_CONCAVE)
    return RegionPair(open_verdict, concave if ar.le(u * t, 1) else open_verdict)


def classify_monotone_chain(q: Exponent, s: Exponent) -> RegionPair:
    """Each step of the chain holds for -1 <= q < 0 and s >= 1"""
    ar = _Arithmetic((q, s))
    q, s = ar.values
    holds = ar.ge(q, -1) and ar.lt(q, 0) and ar.ge(s, 1)
    return RegionPair(
        RegionVerdict(
            RegionStatus.PROVEN_CONVEX if holds else RegionStatus.OPEN_CONVEXITY,
            TAG_MONOTONE_CHAIN,
        ),
        RegionVerdict(RegionStatus.OPEN_CONVEXITY, TAG_MONOTONE_CHAIN),
    )
