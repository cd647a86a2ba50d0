import pytest
from hypothesis import given, strategies as st

from helpers import boundary_set, param_tuples
from sobolev_oracle.decision import (
    CASE_PREDICATES, CaseLabel, Equation, FailureTag, InequalityKind, PreconditionViolated,
    decide_b_zero_cor18, decide_c_zero_th17, decide_embedding, matching_cases, necessity_failure,
)
from sobolev_oracle.params import INF, Q, EmbeddingParams, InvalidParams, derive, kelvin_dual


def P(*args):
    return EmbeddingParams.of(*args)


class TestExamples:
    def test_a_zero(self):
        v = decide_embedding(P(3, 0, 5, 1, 2, 2))
        assert not v.holds and v.failure.tag is FailureTag.AZero

    def test_case_i(self):
        v = decide_embedding(P(3, 2, 0, 0, 2, 2))
        assert v.holds and v.case_label is CaseLabel.T1_i
        assert v.inequality.equation is Equation.Eq8 and v.inequality.theta == Q(1, 3)

    def test_case_iii_nondegenerate_has_full_gradient_weight(self):
        # ap - N = 0 != b - p = -1: multiplicative form with theta = 1
        v = decide_embedding(P(2, 1, 1, -1, 2, 2))
        assert v.holds and v.case_label is CaseLabel.T1_iii
        assert v.inequality.equation is Equation.Eq8 and v.inequality.theta == 1

    def test_case_iii_degenerate_gradient_only(self):
        # ap - N = b - p = 0, c = c0 = c1 = 2, p <= r = 4 <= p* = inf
        v = decide_embedding(P(2, 1, 2, 2, 2, 4))
        assert v.holds and v.case_label is CaseLabel.T1_iii
        assert v.inequality.equation is Equation.Eq9
        assert v.inequality.kind is InequalityKind.GradientOnly and v.inequality.theta == 1

    def test_theta_at_critical_ratio_included(self):
        v = decide_embedding(P(3, 1, 0, 6, 2, 12))
        assert v.holds and v.case_label is CaseLabel.T1_i and v.inequality.theta == Q(1, 2)

    def test_theta_beyond_critical_ratio(self):
        v = decide_embedding(P(3, 1, 0, 5, 2, 12))
        assert not v.holds and v.failure.tag is FailureTag.ThetaExceedsPStarOverR

    def test_case_iv(self):
        v = decide_embedding(P(3, 1, 1, 9, 2, 12))
        assert v.holds and v.case_label is CaseLabel.T1_iv
        assert v.inequality.equation is Equation.Eq10 and v.inequality.theta == Q(1, 2)

    def test_case_ii(self):
        v = decide_embedding(P(3, -1, 0, -4, 2, 2))
        d = derive(P(3, -1, 0, -4, 2, 2))
        assert (d.c0, d.c1) == (-5, -2)
        assert v.holds and v.case_label is CaseLabel.T1_ii

    def test_c_outside(self):
        assert necessity_failure(P(3, 2, 0, 2, 2, 2)).tag is FailureTag.COutsideClosedInterval

    def test_c_equals_c0(self):
        assert necessity_failure(P(3, 2, 0, 1, 2, 2)).tag is FailureTag.CEqualsC0

    def test_beyond_minus_n(self):
        # b - p = -4 <= -3 with a > 0; c0 = 1, c1 = -5, c = -4 is past -N
        assert necessity_failure(P(3, 2, -2, -4, 2, 2)).tag is FailureTag.T2ivBeyondMinusN

    def test_r_below_p_at_c1_carries_k(self):
        f = necessity_failure(P(3, 1, 0, Q(-9, 4), 2, Q(3, 2)))
        assert f.tag is FailureTag.C1NotContinuousForRLessP
        assert f.scaling_exponent_k == Q(-1, 2)

    def test_invalid_propagates(self):
        with pytest.raises(InvalidParams):
            decide_embedding(P(3, 1, 0, 0, 2, Q(1, 2)))

    def test_holding_tuple_has_no_failure(self):
        assert necessity_failure(P(3, 2, 0, 0, 2, 2)) is None


def _check_verdict(prm):
    v = decide_embedding(prm)
    d = derive(prm)
    cases = matching_cases(prm, d)
    assert len(cases) <= 1
    fail = necessity_failure(prm, d)
    assert v.holds == (fail is None) == bool(cases)
    assert v.holds == (v.case_label is not None) == (v.failure is None)
    if v.holds:
        assert prm.a != 0 and d.theta_c is not None or d.c0 == d.c1 == prm.c
        if prm.r < prm.p:
            assert min(d.c0, d.c1) < prm.c < max(d.c0, d.c1)
        if d.p_star != INF and prm.r > d.p_star and d.theta_c is not None:
            assert d.theta_c <= d.p_star / prm.r
    else:
        if fail.scaling_exponent_k is not None:
            assert fail.scaling_exponent_k == (prm.b - prm.p + prm.dim) / prm.p - prm.a != 0
    return v


class TestProperties:
    @given(param_tuples())
    def test_total_exclusive_and_consistent(self, prm):
        _check_verdict(prm)

    def test_boundary_manifolds(self):
        for prm in boundary_set(3000):
            _check_verdict(prm)

    @given(param_tuples())
    def test_kelvin_invariance(self, prm):
        v, w = decide_embedding(prm), decide_embedding(kelvin_dual(prm))
        assert v.holds == w.holds and v.case_label == w.case_label
        if v.holds:
            assert v.inequality.theta == w.inequality.theta

    @given(param_tuples())
    def test_endpoint_exclusions(self, prm):
        d = derive(prm)
        if prm.r < prm.p:
            assert not decide_embedding(prm.replace(c=d.c1)).holds or d.c0 == d.c1
        if not d.side_config.degenerate:
            assert not decide_embedding(prm.replace(c=d.c0)).holds

    @given(param_tuples())
    def test_range_violation_tag_is_unreachable(self, prm):
        # c = c1, same side, nondegenerate, r outside [p, p*]: an earlier tag always fires
        prm = prm.replace(c=derive(prm).c1)
        f = necessity_failure(prm)
        assert f is None or f.tag is not FailureTag.T1iiiRangeViolated

    def test_predicates_independent(self):
        # every predicate evaluated on its own, never two at once
        for prm in boundary_set(2000, seed=5):
            d = derive(prm)
            assert sum(pred(prm, d) for pred in CASE_PREDICATES.values()) <= 1


class TestCZeroOracle:
    def test_example_ii2(self):
        v = decide_c_zero_th17(P(3, 2, 0, 0, 2, 2))
        assert v.holds and v.clause == "ii-2"
        assert decide_embedding(P(3, 2, 0, 0, 2, 2)).holds

    def test_sobolev_line_example(self):
        # a = N/r and b on the critical line: clause ii-3, case iii
        v = decide_c_zero_th17(P(3, 1, 1, 0, 2, 3))
        assert v.holds and v.clause == "ii-3"
        assert decide_embedding(P(3, 1, 1, 0, 2, 3)).case_label is CaseLabel.T1_iii

    def test_off_line_example_fails(self):
        assert not decide_c_zero_th17(P(3, 1, 2, 0, 2, 3)).holds
        assert decide_embedding(P(3, 1, 2, 0, 2, 3)).failure.tag is FailureTag.CEqualsC0

    @pytest.mark.parametrize("a", [0, -1, Q(-1, 2)])
    def test_nonpositive_a_fails(self, a):
        assert not decide_c_zero_th17(P(3, a, 0, 0, 2, 2)).holds

    def test_precondition(self):
        with pytest.raises(PreconditionViolated):
            decide_c_zero_th17(P(3, 1, 0, 1, 2, 2))

    @given(st.integers(1, 6), st.integers(2, 12), st.integers(1, 12), st.integers(1, 6))
    def test_th17_iii3_two_forms_agree(self, n, p2, r, m):
        # with a = N/r the forms b = a r p (...) and b = N p (...) coincide
        p, r = Q(p2, 2), Q(r) * m / 2
        a = n / r
        gap = Q(1, n) + 1 / r - 1 / p
        assert a * r * p * gap == n * p * gap
        prm = P(n, a, n * p * gap, 0, p, r)
        if r >= 1:
            assert decide_c_zero_th17(prm).holds == decide_embedding(prm).holds


class TestBZeroOracle:
    def test_examples(self):
        assert decide_b_zero_cor18(P(3, 1, 0, 0, 2, 6)).clause == "ii"
        assert decide_b_zero_cor18(P(3, 2, 0, 0, 2, 2)).clause == "i"
        assert not decide_b_zero_cor18(P(3, 1, 0, 0, 2, 12)).holds

    def test_precondition(self):
        with pytest.raises(PreconditionViolated):
            decide_b_zero_cor18(P(3, 1, 1, 0, 2, 2))


def small_grid():
    for n in (1, 2, 3, 5):
        for p in (Q(1), Q(3, 2), Q(2), Q(3), Q(5)):
            ps = n * p / (n - p) if p < n else None
            rs = {Q(1), Q(2), Q(10)}
            if ps is not None:
                rs |= {ps, ps + 1}
            for r in sorted(rs):
                for a2 in range(-10, 11, 3):
                    for b2 in range(-8, 9, 4):
                        yield P(n, Q(a2, 2), Q(b2, 2), 0, p, r)


def test_oracles_agree_on_small_grid():
    count = 0
    for prm in small_grid():
        assert decide_c_zero_th17(prm).holds == decide_embedding(prm).holds, prm
        if prm.b == 0:
            assert decide_b_zero_cor18(prm).holds == decide_embedding(prm).holds, prm
        count += 1
    assert count > 500
