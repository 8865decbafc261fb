import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from renyicont import bounds
from renyicont.entropy import dual_order
from renyicont.errors import ValidationError

import oracles

eps_s = st.floats(0, 1)
dim_s = st.integers(1, 64)
low_s = st.floats(0.5, 0.999999)
high_s = st.one_of(st.floats(1.000001, 1e4), st.just(math.inf))

LOW_ORDERS = (0.5, 0.6, 0.75, 0.9, 0.99, 0.999999)
HIGH_ORDERS = (1.01, 1.5, 2.0, 5.0, 100.0, math.inf)
EPS_GRID = np.linspace(0, 1, 1001)


class TestExamples:
    def test_binary_entropy(self):
        assert bounds.binary_entropy(0.5) == 1.0
        assert bounds.binary_entropy(0) == 0.0 and bounds.binary_entropy(1) == 0.0
        assert bounds.binary_entropy(1 / 11) == pytest.approx(0.4395, abs=1e-4)
        assert bounds.binary_entropy(1 / 11) == pytest.approx(float(oracles.h2(mp_frac(1, 11))), abs=1e-15)
        with pytest.raises(ValidationError):
            bounds.binary_entropy(1.1)

    def test_afw(self):
        assert bounds.afw_von_neumann(0, 3) == 0
        assert bounds.afw_von_neumann(0.3, 1) == pytest.approx(1.3 * bounds.binary_entropy(0.3 / 1.3))
        assert bounds.afw_von_neumann(0.1, 2) == pytest.approx(0.6834, abs=1e-4)
        assert bounds.afw_von_neumann(0.1, 2) == pytest.approx(float(oracles.afw(0.1, 2)), abs=1e-14)

    def test_bound_low(self):
        assert bounds.bound_low(0, 2, 0.5) == 0
        assert bounds.bound_low(0.1, 2, 0.999999) == pytest.approx(0.6834, abs=1e-4)
        assert abs(bounds.bound_low(0.1, 2, 0.999999) - bounds.afw_limit_expression(0.1, 2)) <= 1e-4
        ref = math.log2(1.25) + 2 * math.log2(1 + 0.5 * 2 - 0.25 / 1.25 ** 0.5)
        assert bounds.bound_low(0.25, 2, 0.5) == pytest.approx(ref, abs=1e-14)
        assert bounds.bound_low(0.25, 2, 0.5) == pytest.approx(float(oracles.thm1(0.25, 2, 0.5)), abs=1e-14)
        with pytest.raises(ValidationError):
            bounds.bound_low(0.1, 2, 2.0)
        with pytest.raises(ValidationError):
            bounds.bound_low(1.5, 2, 0.5)

    def test_bound_low_classical(self):
        assert bounds.bound_low_classical(0, 2, 0.5) == 0
        for eps in (0.05, 0.3, 1.0):
            for a in (0.5, 0.8):
                assert bounds.bound_low_classical(eps, 1, a) == pytest.approx(bounds.bound_low(eps, 1, a), abs=1e-14)
                ref = math.log2(1 + eps) + math.log2(1 + eps ** a - eps / (1 + eps) ** (1 - a)) / (1 - a)
                assert bounds.bound_low_classical(eps, 1, a) == pytest.approx(ref, abs=1e-14)
        assert bounds.bound_low_classical(0.1, 4, 0.5) == pytest.approx(
            float(oracles.thm1_classical(0.1, 4, 0.5)), abs=1e-14)

    def test_bound_high(self):
        assert bounds.bound_high(0, 2, 2.0) == 0
        # eps = 1/2 puts sqrt(2 eps) exactly at 1, beta = 1/2
        d = 3
        ref = 1 + 2 * math.log2(1 + d - 1 / math.sqrt(2))
        assert bounds.bound_high(0.5, d, "inf") == pytest.approx(ref, abs=1e-13)
        for a in HIGH_ORDERS:
            for eps in (0.01, 0.3, 0.5):
                beta = dual_order(a)
                assert bounds.bound_high(eps, 2, a) == bounds.bound_low(math.sqrt(2 * eps), 2, beta)
        with pytest.raises(ValidationError):
            bounds.bound_high(0.1, 2, 0.5)

    def test_bound_high_beyond_half_still_evaluated(self):
        v = bounds.bound_high(0.9, 2, 2.0)
        assert math.isfinite(v) and bounds.cor1_radius(0.9) > 1
        assert v == pytest.approx(float(oracles.thm1(math.sqrt(1.8), 2, 2 / 3)), abs=1e-13)

    def test_bound_hmin(self):
        assert bounds.bound_hmin(0, 2) == 0
        assert bounds.bound_hmin(1, 2) == pytest.approx(2.3219, abs=1e-4)
        assert bounds.bound_hmin(1, 2) == pytest.approx(math.log2(5))
        assert bounds.bound_hmin(0.5, 1) == pytest.approx(0.5850, abs=1e-4)

    def test_jabbour_datta(self):
        assert bounds.bound_jabbour_datta(0, 2, 0.5) == 0
        assert bounds.bound_jabbour_datta(1, 2, 0.5) == pytest.approx(0, abs=1e-15)
        assert bounds.bound_jabbour_datta(0.3, 1, 0.5) == 0
        val = bounds.bound_jabbour_datta(0.1, 2, 0.5)
        assert val == pytest.approx(2 * math.log2(math.sqrt(0.9) + math.sqrt(0.1)), abs=1e-14)
        assert val == pytest.approx(float(oracles.jabbour_datta(0.1, 2, 0.5)), abs=1e-14)
        assert val == pytest.approx(0.678072, abs=1e-6)

    def test_jabbour_datta_envelope(self):
        for d in (2, 3, 5):
            peak = 1 - 1 / d
            assert bounds.bound_jabbour_datta(peak, d, 0.5) == pytest.approx(math.log2(d), abs=1e-12)
            assert bounds.bound_jabbour_datta_envelope(1.0, d, 0.5) == pytest.approx(math.log2(d), abs=1e-12)
            assert bounds.bound_jabbour_datta(1.0, d, 0.5) < math.log2(d)

    def test_leditzky(self):
        assert bounds.leditzky_gap(1, 0.5) == 0
        assert bounds.leditzky_gap(0.5, 0.5) == pytest.approx(-2)
        assert bounds.leditzky_gap(0.9, 0.75) == pytest.approx(-0.9120, abs=1e-4)
        assert bounds.leditzky_gap(0, 0.75) == -math.inf
        with pytest.raises(ValidationError):
            bounds.leditzky_gap(0.5, 2.0)

    def test_limit_expression(self):
        assert bounds.afw_limit_expression(0, 2) == 0
        assert bounds.afw_limit_expression(0.1, 2) == pytest.approx(0.6834, abs=1e-4)
        for d in (1, 2, 7, 64):
            for eps in np.linspace(0, 1, 100):
                assert abs(bounds.afw_limit_expression(eps, d) - bounds.afw_von_neumann(eps, d)) <= 1e-12

    def test_inputs_type(self):
        bounds.BoundInputs(0.5, 2)
        with pytest.raises(ValidationError):
            bounds.BoundInputs(-0.1, 2)
        with pytest.raises(ValidationError):
            bounds.BoundInputs(0.1, 0)
        with pytest.raises(ValidationError):
            bounds.bound_hmin(0.1, 2.5)


def mp_frac(a, b):
    return oracles.mp.mpf(a) / b


class TestInvariants:
    @pytest.mark.parametrize("d", [1, 2, 3, 8, 64])
    def test_monotone_and_zero(self, d):
        fs = [lambda e, a=a: bounds.bound_low(e, d, a) for a in LOW_ORDERS]
        fs += [lambda e, a=a: bounds.bound_low_classical(e, d, a) for a in LOW_ORDERS]
        fs += [lambda e, a=a: bounds.bound_high(e, d, a) for a in HIGH_ORDERS]
        fs += [lambda e, a=a: bounds.bound_jabbour_datta_envelope(e, d, a) for a in LOW_ORDERS]
        fs += [lambda e: bounds.bound_hmin(e, d), lambda e: bounds.afw_von_neumann(e, d)]
        for f in fs:
            v = np.array([f(e) for e in EPS_GRID])
            assert v[0] == 0
            assert np.all(np.isfinite(v))
            assert np.all(np.diff(v) >= -1e-10)

    def test_raw_jabbour_datta_turns_over(self):
        # the formula as written peaks at 1 - 1/d_A; only its envelope is monotone
        v = [bounds.bound_jabbour_datta(e, 2, 0.5) for e in (0.4, 0.5, 0.6)]
        assert v[1] > v[0] and v[1] > v[2]

    @given(eps_s, dim_s, low_s)
    def test_classical_below_general(self, eps, d, a):
        assert bounds.bound_low_classical(eps, d, a) <= bounds.bound_low(eps, d, a) + 1e-12

    @given(eps_s, dim_s, low_s)
    def test_nonnegative(self, eps, d, a):
        assert bounds.bound_low(eps, d, a) >= 0
        assert bounds.bound_low_classical(eps, d, a) >= -1e-15

    @given(eps_s, st.integers(1, 16), low_s)
    def test_matches_oracle(self, eps, d, a):
        assert bounds.bound_low(eps, d, a) == pytest.approx(float(oracles.thm1(eps, d, a)), rel=1e-9, abs=1e-12)
        assert bounds.bound_low_classical(eps, d, a) == pytest.approx(
            float(oracles.thm1_classical(eps, d, a)), rel=1e-9, abs=1e-12)

    @given(eps_s, dim_s, high_s)
    def test_substitution_identity(self, eps, d, a):
        assert bounds.bound_high(eps, d, a) == bounds.bound_low(math.sqrt(2 * eps), d, dual_order(a)) \
            if 2 * eps <= 1 else math.isfinite(bounds.bound_high(eps, d, a))

    def test_alpha_one_limit_grid(self):
        for d in (1, 2, 4, 16):
            for eps in np.linspace(0, 1, 20):
                assert abs(bounds.bound_low(eps, d, 1 - 1e-6) - bounds.afw_von_neumann(eps, d)) <= 1e-4
