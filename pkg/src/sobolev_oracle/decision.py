"""Exact classification of embedding questions.

``decide_embedding`` evaluates the four sufficient conditions as a single
decision tree and asks :func:`necessity_failure` for the reason when none
applies.  The per-case predicates behind :func:`matching_cases` and the
necessity chain are written independently of that tree, so agreement among
the three is a meaningful check.
``decide_c_zero_th17`` and ``decide_b_zero_cor18`` are literal transcriptions
of the unweighted-target characterisations and share no code with either.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from .params import (
    INF,
    Q,
    Rat,
    DerivedQuantities,
    EmbeddingParams,
    derive,
    validate,
)


class PreconditionViolated(ValueError):
    pass


class CaseLabel(enum.Enum):
    T1_i = "i"
    T1_ii = "ii"
    T1_iii = "iii"
    T1_iv = "iv"


class FailureTag(enum.Enum):
    AZero = "AZero"
    COutsideClosedInterval = "COutsideClosedInterval"
    CEqualsC0 = "CEqualsC0"
    T2ivBeyondMinusN = "T2ivBeyondMinusN"
    ThetaExceedsPStarOverR = "ThetaExceedsPStarOverR"
    C1NotContinuousForRLessP = "C1NotContinuousForRLessP"
    T1iiiRangeViolated = "T1iiiRangeViolated"


class InequalityKind(enum.Enum):
    Multiplicative = "Multiplicative"
    GradientOnly = "GradientOnly"


class Equation(enum.Enum):
    Eq8 = "Eq8"
    Eq9 = "Eq9"
    Eq10 = "Eq10"


@dataclass(frozen=True)
class FailureReason:
    tag: FailureTag
    scaling_exponent_k: Optional[Rat] = None


@dataclass(frozen=True)
class InequalitySpec:
    """Exponent data of ``||u||_{c,r} <= C ||grad u||^theta || |x|^a u ||_inf^(1-theta)``."""

    kind: InequalityKind
    theta: Rat
    c_used: Rat
    equation: Equation


@dataclass(frozen=True)
class Verdict:
    holds: bool
    case_label: Optional[CaseLabel] = None
    failure: Optional[FailureReason] = None
    inequality: Optional[InequalitySpec] = None
    derived: Optional[DerivedQuantities] = None


# -- sufficient conditions ---------------------------------------------------

def _theta_ok(d: DerivedQuantities, r) -> bool:
    # vacuous unless p < N and r > p*
    return d.star is None or d.theta_c <= d.p_star / r


def case_i(params: EmbeddingParams, d: DerivedQuantities) -> bool:
    sc = d.side_config
    c, c0, c1 = params.c, d.c0, d.c1
    return (
        sc.sign > 0 or (sc.sign == 0 and params.a != 0)
    ) and not sc.degenerate and (c0 < c < c1 or c1 < c < c0) and _theta_ok(d, params.r)


def case_ii(params: EmbeddingParams, d: DerivedQuantities) -> bool:
    c, c0, mn = params.c, d.c0, -params.dim
    return (
        d.side_config.sign < 0
        and (c0 < c < mn or mn < c < c0)
        and _theta_ok(d, params.r)
    )


def case_iii(params: EmbeddingParams, d: DerivedQuantities) -> bool:
    return (
        d.side_config.sign > 0
        and params.c == d.c1
        and params.p <= params.r <= d.p_star
    )


def case_iv(params: EmbeddingParams, d: DerivedQuantities) -> bool:
    return (
        d.side_config.degenerate
        and params.c == d.c1
        and d.star is not None
        and params.a != 0
    )


CASE_PREDICATES = {
    CaseLabel.T1_i: case_i,
    CaseLabel.T1_ii: case_ii,
    CaseLabel.T1_iii: case_iii,
    CaseLabel.T1_iv: case_iv,
}


def matching_cases(params: EmbeddingParams, derived: Optional[DerivedQuantities] = None):
    """All case labels whose predicate holds (at most one, in fact)."""
    d = derived or derive(params)
    return [label for label, pred in CASE_PREDICATES.items() if pred(params, d)]


def _inequality(label: CaseLabel, params: EmbeddingParams, d: DerivedQuantities) -> InequalitySpec:
    if label is CaseLabel.T1_iv:
        return InequalitySpec(InequalityKind.Multiplicative, d.p_star / params.r, params.c, Equation.Eq10)
    if d.side_config.degenerate:
        # only reachable through case iii
        return InequalitySpec(InequalityKind.GradientOnly, Q(1), params.c, Equation.Eq9)
    return InequalitySpec(InequalityKind.Multiplicative, d.theta_c, params.c, Equation.Eq8)


# -- necessary conditions ----------------------------------------------------

def necessity_failure(params: EmbeddingParams,
                      derived: Optional[DerivedQuantities] = None) -> Optional[FailureReason]:
    """First violated necessary condition, or ``None``.

    Checked in the order: ``a == 0``; ``c`` outside the closed interval
    ``[c0, c1]``; ``c == c0 != c1``; ``c`` beyond ``-N`` when ``b - p`` sits
    on the far side of ``-N``; ``theta_c > p*/r``; ``c == c1`` with ``r < p``.
    """
    d = derived or derive(params)
    n, a, b, c, p, r = params.as_tuple()
    c0, c1 = d.c0, d.c1
    if a == 0:
        return FailureReason(FailureTag.AZero)
    if not (c0 <= c <= c1 or c1 <= c <= c0):
        return FailureReason(FailureTag.COutsideClosedInterval)
    degenerate = d.side_config.degenerate
    if not degenerate and c == c0:
        return FailureReason(FailureTag.CEqualsC0)
    mn = -n
    if (((b - p <= mn and a > 0) or (b - p >= mn and a < 0))
            and not (c0 < c < mn or mn < c < c0)):
        return FailureReason(FailureTag.T2ivBeyondMinusN)
    if not degenerate and p < n and r > d.p_star and d.theta_c > d.p_star / r:
        return FailureReason(FailureTag.ThetaExceedsPStarOverR)
    if c == d.c1 and r < p:
        k = None if degenerate else (b - p + n) / p - a
        return FailureReason(FailureTag.C1NotContinuousForRLessP, k)
    if c == d.c1 and not degenerate and d.side_config.strictly_same_side and not (p <= r <= d.p_star):
        return FailureReason(FailureTag.T1iiiRangeViolated)
    return None


def _first_case(params: EmbeddingParams, d: DerivedQuantities) -> Optional[CaseLabel]:
    # the four predicates as one decision tree; matching_cases is the slow reference
    sc = d.side_config
    c, c0, c1 = params.c, d.c0, d.c1
    if sc.sign < 0:
        mn = -params.dim
        if (c0 < c < mn or mn < c < c0) and _theta_ok(d, params.r):
            return CaseLabel.T1_ii
        return None
    if sc.degenerate:
        # a (b - p + N) = a^2 p here, so the sign is never negative
        if c != c1:
            return None
        if sc.sign > 0 and params.p <= params.r <= d.p_star:
            return CaseLabel.T1_iii
        if d.star is not None and params.a != 0:
            return CaseLabel.T1_iv
        return None
    if c0 < c < c1 or c1 < c < c0:
        if params.a != 0 and _theta_ok(d, params.r):
            return CaseLabel.T1_i
        return None
    if sc.sign > 0 and c == c1 and params.p <= params.r <= d.p_star:
        return CaseLabel.T1_iii
    return None


def decide_embedding(params: EmbeddingParams) -> Verdict:
    validate(params)
    d = derive(params)
    label = _first_case(params, d)
    if label is not None:
        return Verdict(True, label, None, _inequality(label, params, d), d)
    failure = necessity_failure(params, d)
    if failure is None:
        raise RuntimeError(f"no case and no failure reason for {params}")
    return Verdict(False, None, failure, None, d)


# -- independent oracles -----------------------------------------------------

@dataclass(frozen=True)
class OracleVerdict:
    holds: bool
    clause: Optional[str] = None


def decide_c_zero_th17(params: EmbeddingParams) -> OracleVerdict:
    """Embedding into the unweighted ``L^r`` (``c == 0``), clause by clause."""
    validate(params)
    n, a, b, c, p, r = params.as_tuple()
    if c != 0:
        raise PreconditionViolated("requires c == 0")
    if r < 1:
        raise PreconditionViolated("requires r >= 1")
    if a <= 0:
        return OracleVerdict(False)
    p_star = n * p / (n - p) if p < n else INF
    nr = n / r
    gap = Q(1, n) + 1 / r - 1 / p
    b_sob = n * p * gap
    b_high = a * r * p * gap
    if r < p:
        if a < nr and b > b_sob:
            return OracleVerdict(True, "i-1")
        if a > nr and b < b_sob:
            return OracleVerdict(True, "i-2")
    elif r <= p_star:
        if a < nr and b >= b_sob:
            return OracleVerdict(True, "ii-1")
        if a > nr and b <= b_sob:
            return OracleVerdict(True, "ii-2")
        if a == nr and b == b_sob:
            return OracleVerdict(True, "ii-3")
    else:
        if a < nr and b >= b_high:
            return OracleVerdict(True, "iii-1")
        if a > nr and b <= b_high:
            return OracleVerdict(True, "iii-2")
        if a == nr and b == b_high:
            return OracleVerdict(True, "iii-3")
    return OracleVerdict(False)


def decide_b_zero_cor18(params: EmbeddingParams) -> OracleVerdict:
    """Embedding with ``b == c == 0``."""
    validate(params)
    n, a, b, c, p, r = params.as_tuple()
    if b != 0 or c != 0:
        raise PreconditionViolated("requires b == 0 and c == 0")
    if r < 1:
        raise PreconditionViolated("requires r >= 1")
    if a <= 0:
        return OracleVerdict(False)
    p_star = n * p / (n - p) if p < n else INF
    if r < p_star and a > n / r:
        return OracleVerdict(True, "i")
    if p < n and r == p_star:
        return OracleVerdict(True, "ii")
    if p < n and r > p_star and a < n / r:
        return OracleVerdict(True, "iii")
    return OracleVerdict(False)
