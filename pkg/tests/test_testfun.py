import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sobolev_oracle.params import Q, EmbeddingParams
from sobolev_oracle.quad import weighted_sup_norm
from sobolev_oracle.testfun import (
    Abs, Constant, Cutoff, DomainError, Indicator, KelvinImage, LogBump, OneMinusCutoff, Power,
    PowerTransform, Product, Scale, Sum, add, angular_constant, angular_coordinate_power,
    angular_hemisphere, counterexample_near_infinity, counterexample_near_zero, cutoff,
    kelvin_image, log_bump_family, power, power_transform, product, profile_from_json, scale,
    separable, spherical_mean_power,
)

GRID = np.exp(np.linspace(math.log(1e-3), math.log(1e3), 200))


def profiles():
    z = Cutoff()
    return {
        "power": Power(Q(3, 2)),
        "inverse square": Power(-2),
        "cutoff": z,
        "one minus cutoff": OneMinusCutoff(),
        "bump": LogBump(0.0, 1.0),
        "shifted bump": LogBump(0.5, 2.0),
        "near zero": counterexample_near_zero(EmbeddingParams.of(3, 1, 0, -4, 2, 1)),
        "near infinity": counterexample_near_infinity(EmbeddingParams.of(3, 1, 0, 2, 2, 2)),
        "tail": add(z, product(OneMinusCutoff(), power(Q(-5, 2)))),
        "scaled": scale(3.0, product(power(Q(1, 2)), z)),
        "kelvin": kelvin_image(z),
        "kelvin bump": kelvin_image(product(power(1), LogBump(0.3, 0.7))),
        "transform": power_transform(product(power(Q(1, 3)), z), Q(5, 2)),
        "log dilation": log_bump_family(Q(2, 3), 0.25),
        "sum": Sum(Power(1), Product(Constant(-2.0), Power(Q(-1, 2)))),
    }


def richardson(f, t, levels=3):
    h = 1e-3 * t
    d = lambda h: (f.evaluate(t + h) - f.evaluate(t - h)) / (2 * h)
    row = [d(h / 2 ** i) for i in range(levels)]
    for j in range(1, levels):
        row = [(4 ** j * row[i + 1] - row[i]) / (4 ** j - 1) for i in range(len(row) - 1)]
    return row[0], h


@pytest.mark.parametrize("name", list(profiles()))
def test_derivative_matches_richardson_differences(name):
    f = profiles()[name]
    bps = np.array(f.breakpoints)
    # values far below the profile's own scale carry no relative information
    floor = 1e-10 * np.max(np.abs(f.derivative(GRID)))
    checked = 0
    for t in GRID:
        fd, h = richardson(f, t)
        if bps.size and np.min(np.abs(bps - t)) <= 2 * h:
            continue
        exact = float(f.derivative(t))
        scale_ = max(abs(exact), abs(float(f.evaluate(t))) / t, floor)
        assert abs(fd - exact) <= 1e-6 * scale_, (t, fd, exact)
        checked += 1
    assert checked > 150


class TestCutoff:
    def test_values(self):
        z = cutoff()
        assert z(0.3) == 1.0 and z(2.0) == 0.0 and z.derivative(0.3) == 0.0
        assert z(0.5) == 1.0 and z(1.0) == 0.0

    def test_range_and_breakpoints(self):
        t = np.linspace(0.4, 1.1, 1001)
        v = cutoff()(t)
        assert np.all((0 <= v) & (v <= 1)) and np.all(np.diff(v) <= 0)
        assert cutoff().breakpoints == pytest.approx((0.5, 1.0))

    def test_concrete_form(self):
        phi = lambda s: math.exp(-1 / s) if s > 0 else 0.0
        for t in (0.55, 0.7, 0.75, 0.9, 0.99):
            want = phi(2 - 2 * t) / (phi(2 - 2 * t) + phi(2 * t - 1))
            assert cutoff()(t) == pytest.approx(want, rel=1e-14)


class TestCounterexamples:
    def test_near_zero_exponent(self):
        f = counterexample_near_zero(EmbeddingParams.of(3, 1, 0, -4, 1, 1))
        t = np.array([0.1, 0.3, 0.7, 2.0])
        assert np.array_equal(f(t), t * cutoff()(t))

    def test_near_zero_target_integrand(self):
        prm = EmbeddingParams.of(3, 2, 0, -4, 2, 2)
        f = counterexample_near_zero(prm)
        t = np.array([1e-4, 1e-2, 0.3])
        assert np.allclose(t ** float(prm.c) * f(t) ** 2, t ** -3.0, rtol=1e-12)
        assert f.expansion("0").leading()[0] == Q(1, 2)

    def test_near_infinity(self):
        f = counterexample_near_infinity(EmbeddingParams.of(3, 1, 0, 2, 2, 2))
        t = np.array([0.1, 0.3, 0.5])
        assert np.all(f(t) == 0) and np.all(f.derivative(t) == 0)
        assert f.expansion("inf").leading()[0] == Q(-5, 2)


class TestLogBump:
    def test_unit_radius(self):
        f = log_bump_family(Q(3, 2), 0.5)
        assert f(1.0) == pytest.approx(1.0)

    def test_support(self):
        lam = 0.5
        f = log_bump_family(1, lam)
        lo, hi = math.exp(-1 / lam), math.exp(1 / lam)
        assert f(lo * 0.999) == 0 and f(hi * 1.001) == 0 and f(lo * 1.01) > 0
        assert f.breakpoints == pytest.approx((lo, hi))

    def test_weighted_is_bump(self):
        a, lam = Q(3, 4), 2.0
        f = log_bump_family(a, lam)
        t = np.exp(np.linspace(-0.49, 0.49, 50))
        x = lam * np.log(t)
        assert np.allclose(t ** float(a) * f(t), np.exp(1 - 1 / (1 - x * x)), rtol=1e-13)
        assert weighted_sup_norm(f, a).value == pytest.approx(1.0, rel=1e-12)


class TestScale:
    @given(st.floats(1e-3, 1e3), st.sampled_from(sorted(profiles())))
    def test_bitwise(self, lam, name):
        f = profiles()[name]
        g = Scale(lam, f)
        assert np.array_equal(g.evaluate(GRID), f.evaluate(lam * GRID))
        assert np.array_equal(g.derivative(GRID), lam * f.derivative(lam * GRID))

    def test_identity_shortcut(self):
        z = cutoff()
        assert scale(1.0, z) is z

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            Scale(0.0, cutoff())


class TestPowerTransform:
    def test_constant(self):
        g = power_transform(Constant(2.0), 3)
        assert g(1.7) == 8.0 and g.derivative(1.7) == 0.0

    def test_power(self):
        assert power_transform(Power(-1), 2) == Power(-2)

    @pytest.mark.parametrize("s", [Q(1), Q(3, 2), Q(2), Q(7, 3)])
    def test_chain_rule(self, s):
        f = product(power(Q(1, 3)), LogBump(0.2, 1.5))
        g = power_transform(f, s)
        fv, dv = f(GRID), f.derivative(GRID)
        want = float(s) * fv ** (float(s) - 1) * dv
        got = g.derivative(GRID)
        assert np.allclose(got, want, rtol=1e-12, atol=0)
        assert np.allclose(g(GRID), fv ** float(s), rtol=1e-12, atol=0)

    def test_rejects_negative_profile(self):
        with pytest.raises(DomainError):
            power_transform(add(Power(1), Constant(-1.0)), 2)

    def test_rejects_small_exponent(self):
        with pytest.raises(DomainError):
            power_transform(cutoff(), Q(1, 2))


class TestKelvin:
    def test_power(self):
        assert kelvin_image(Power(Q(5, 3))) == Power(Q(-5, 3))

    def test_cutoff_image(self):
        g = kelvin_image(cutoff())
        assert g(2.0) == 1.0 and g(5.0) == 1.0 and g(1.0) == 0.0 and g(0.3) == 0.0

    @pytest.mark.parametrize("name", list(profiles()))
    def test_involution(self, name):
        f = profiles()[name]
        g = kelvin_image(kelvin_image(f))
        assert g == f
        h = KelvinImage(KelvinImage(f))
        assert np.allclose(h(GRID), f(GRID), rtol=1e-12, atol=1e-300)

    def test_derivative_formula(self):
        f = add(cutoff(), LogBump(1.0, 0.5))
        g = kelvin_image(f)
        assert np.allclose(g.derivative(GRID), -GRID ** -2 * f.derivative(1 / GRID), rtol=1e-12, atol=0)


class TestJson:
    @pytest.mark.parametrize("name", list(profiles()))
    def test_round_trip(self, name):
        f = profiles()[name]
        text = json.dumps(f.to_json())
        g = profile_from_json(json.loads(text))
        assert np.array_equal(g(GRID), f(GRID))

    def test_extra_nodes(self):
        for f in (Indicator(0.5, 2.0), Abs(add(Power(1), Constant(-1.0)))):
            assert np.array_equal(profile_from_json(f.to_json())(GRID), f(GRID))

    def test_unknown(self):
        with pytest.raises(ValueError):
            profile_from_json({"type": "Spline"})


class TestSphericalMean:
    def test_constant_angular(self):
        f = product(power(Q(1, 2)), cutoff())
        assert spherical_mean_power(separable(f, angular_constant()), 2) is f

    def test_half_mean(self):
        f = product(power(Q(1, 2)), cutoff())
        v = spherical_mean_power(separable(f, angular_hemisphere()), 2)
        assert np.allclose(v(GRID), f(GRID) / math.sqrt(2), rtol=1e-15)

    def test_sign_changing_radial(self):
        f = add(Power(1), Constant(-1.0))
        v = spherical_mean_power(separable(f, angular_constant()), 3)
        assert np.array_equal(v(GRID), np.abs(f(GRID)))

    def test_coordinate_power_mean(self):
        # mean of sigma_1^2 over S^{N-1} is 1/N
        for n in (2, 3, 5):
            mean, sup, _ = angular_coordinate_power(1, n)
            assert mean(2) == pytest.approx(1 / n, rel=1e-14)
            assert mean(0) == pytest.approx(1.0, rel=1e-14)

    ANGULAR = [angular_constant(), angular_constant(2.5), angular_hemisphere(),
               angular_coordinate_power(1, 3), angular_coordinate_power(3, 2)]

    @pytest.mark.parametrize("ang", ANGULAR, ids=lambda a: a[2])
    @pytest.mark.parametrize("s", [1, 2, 3.5])
    def test_sup_monotonicity(self, ang, s):
        a = Q(1, 2)
        f = product(power(Q(-1, 4)), cutoff())
        u = separable(f, ang)
        assert u.angular_mean(s) <= u.angular_sup ** s * (1 + 1e-15)
        v = spherical_mean_power(u, s)
        lhs = weighted_sup_norm(v, a).value
        rhs = u.angular_sup * weighted_sup_norm(f, a).value
        assert lhs <= rhs * (1 + 1e-12)
