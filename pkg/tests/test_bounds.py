"""Closed-form bound evaluators.

All frozen constants below were computed once from the formulas with
independent arithmetic (math module / scipy.integrate) and hardcoded.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from prefsearch.bounds import (
    adaptive_simpson,
    binary_entropy,
    lemma1_bounds,
    lemma1_constant,
    mse_lower_bound,
    prop1_lower,
    prop2_bounds,
    theorem3_bounds,
)
from prefsearch.response_model import logistic

# frozen reference values
HB_QUARTER = 0.8112781244591328
HB_INV_E = 0.9490299446401695
MSE_FLOOR_D2_I0 = 0.11709966304863834   # = 1 / (pi e)
MSE_FLOOR_D2_I5 = 0.003659364470269948
MSE_FLOOR_D3_I4 = 0.027663061951983054
C_2 = 1.3062129185304197
C_3 = 2.351183253354755
C_8 = 8.359762678594686
PROP1_HALF_2_1 = 0.02185673030963553    # c=0.5, k=2, sigma=1
PROP2_DEV_KS4 = 0.305407353968544
DEV_LIMIT = 0.13212055882855767         # (e - 2) / (2 e)
LEMMA1_LOWER_I2 = -2.270780163555853
LEMMA1_UPPER_I2 = 4.094191170361282     # = log2(2 pi e)
T3_TAU1_CASE = 5.871593114300805        # eps=1e-3, d=2, k_min=10


def test_binary_entropy_frozen_values():
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.25) == pytest.approx(HB_QUARTER, abs=1e-15)
    assert binary_entropy(1 / math.e) == pytest.approx(HB_INV_E, abs=1e-15)


def test_binary_entropy_symmetry_and_vectorization():
    ps = np.linspace(0.0, 1.0, 21)
    vec = binary_entropy(ps)
    assert vec.shape == ps.shape
    np.testing.assert_allclose(vec, vec[::-1], atol=1e-14)  # h(p) = h(1-p)
    for p, v in zip(ps, vec):
        assert v == pytest.approx(binary_entropy(float(p)), abs=1e-15)
    with pytest.raises(ValueError):
        binary_entropy(1.2)
    with pytest.raises(ValueError):
        binary_entropy(-0.1)


def test_mse_floor_frozen_values():
    assert mse_lower_bound(2, 0) == pytest.approx(MSE_FLOOR_D2_I0, abs=1e-15)
    assert mse_lower_bound(2, 5) == pytest.approx(MSE_FLOOR_D2_I5, abs=1e-15)
    assert mse_lower_bound(3, 4) == pytest.approx(MSE_FLOOR_D3_I4, abs=1e-15)
    with pytest.raises(ValueError):
        mse_lower_bound(0, 1)
    with pytest.raises(ValueError):
        mse_lower_bound(2, -1)


def test_mse_floor_halves_every_d_queries():
    # 2^(-2i/d) structure: i -> i + d multiplies the floor by 1/4
    for d in (2, 3, 5):
        for i in (0, 3, 10):
            assert mse_lower_bound(d, i + d) == pytest.approx(
                mse_lower_bound(d, i) / 4.0, rel=1e-12)


def test_lemma1_constant_frozen_values():
    assert lemma1_constant(2) == pytest.approx(C_2, abs=1e-15)
    assert lemma1_constant(3) == pytest.approx(C_3, abs=1e-15)
    assert lemma1_constant(8) == pytest.approx(C_8, abs=1e-14)
    with pytest.raises(ValueError):
        lemma1_constant(0)


def test_lemma1_bounds_frozen_identity():
    lo, up = lemma1_bounds(np.eye(2))
    assert lo == pytest.approx(LEMMA1_LOWER_I2, abs=1e-12)
    assert up == pytest.approx(LEMMA1_UPPER_I2, abs=1e-12)


def test_lemma1_bounds_depend_only_on_generalized_variance():
    # diag(4, 1/4) has det 1, so the sandwich matches the identity case
    lo, up = lemma1_bounds(np.diag([4.0, 0.25]))
    assert lo == pytest.approx(LEMMA1_LOWER_I2, abs=1e-12)
    assert up == pytest.approx(LEMMA1_UPPER_I2, abs=1e-12)


def test_lemma1_upper_equals_gaussian_entropy():
    rng = np.random.default_rng(2)
    for _ in range(5):
        q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        cov = (q * rng.uniform(0.2, 3.0, 3)) @ q.T
        h_gauss = 0.5 * math.log2((2 * math.pi * math.e) ** 3 * np.linalg.det(cov))
        lo, up = lemma1_bounds(cov)
        assert up == pytest.approx(h_gauss, abs=1e-9)
        assert lo < h_gauss


def test_lemma1_bounds_validation():
    with pytest.raises(ValueError):
        lemma1_bounds(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        lemma1_bounds(np.diag([1.0, -1.0]))


def test_prop1_frozen_value_and_independent_route():
    assert prop1_lower(0.5, 2.0, 1.0) == pytest.approx(PROP1_HALF_2_1, abs=1e-15)
    # independent scalar route
    for c, k, s in [(0.1, 5.0, 0.3), (0.9, 20.0, 0.05), (0.5, 1.0, 2.0)]:
        f = 1.0 / (1.0 + math.exp(-c * k * s / 2.0))
        hb = -(f * math.log2(f) + (1 - f) * math.log2(1 - f))
        assert prop1_lower(c, k, s) == pytest.approx((1 - hb) * (1 - c), abs=1e-12)


def test_prop1_edges_and_limits():
    assert prop1_lower(0.0, 10.0, 1.0) == 0.0   # equiprobable coin flip
    assert prop1_lower(1.0, 10.0, 1.0) == 0.0   # (1 - c) factor vanishes
    assert prop1_lower(0.5, 10.0, 0.0) == 0.0   # zero spread
    # k sigma -> infinity: floor approaches (1 - c)
    assert prop1_lower(0.5, 1e9, 1.0) == pytest.approx(0.5, abs=1e-9)
    with pytest.raises(ValueError):
        prop1_lower(1.5, 1.0, 1.0)
    with pytest.raises(ValueError):
        prop1_lower(0.5, -1.0, 1.0)


@given(st.floats(0.05, 0.95), st.floats(0.1, 50.0),
       st.floats(0.01, 5.0), st.floats(1.01, 3.0))
@settings(max_examples=80, deadline=None)
def test_prop1_monotone_in_sigma(c, k, sigma, grow):
    # more posterior spread can only raise the per-query floor
    assert prop1_lower(c, k, sigma * grow) >= prop1_lower(c, k, sigma) - 1e-12


def test_prop2_frozen_values():
    dev, info = prop2_bounds(2.0, 2.0)  # k sigma = 4
    assert dev == pytest.approx(PROP2_DEV_KS4, abs=1e-15)
    assert info == 0.0  # raw floor is negative at k sigma = 4; clamped
    # k sigma = e ln 2 zeroes the h_b argument; deviation is exactly 1/2
    dev0, info0 = prop2_bounds(math.e * math.log(2.0), 1.0)
    assert dev0 == pytest.approx(0.5, abs=1e-15)
    assert info0 == 0.0


def test_prop2_limiting_constants():
    dev, info = prop2_bounds(1e12, 1.0)
    assert dev == pytest.approx(DEV_LIMIT, abs=1e-9)
    assert info == pytest.approx(HB_INV_E, abs=1e-9)


def test_prop2_independent_route():
    for k, s in [(10.0, 0.5), (40.0, 0.2), (3.0, 1.0)]:
        ks = k * s
        dev_exp = (math.e - 2.0) / (2.0 * math.e) + math.log(2.0) / ks
        arg = 1.0 / math.e - math.log(2.0) / ks
        arg = min(max(arg, 0.0), 0.5)
        hb = 0.0 if arg == 0.0 else -(arg * math.log2(arg) + (1 - arg) * math.log2(1 - arg))
        info_exp = hb - math.pi ** 2 * math.log2(math.e) / (3.0 * ks)
        info_exp = min(max(info_exp, 0.0), 1.0)
        dev, info = prop2_bounds(k, s)
        assert dev == pytest.approx(dev_exp, abs=1e-12)
        assert info == pytest.approx(info_exp, abs=1e-12)
    with pytest.raises(ValueError):
        prop2_bounds(0.0, 1.0)


def test_adaptive_simpson_polynomials_exact():
    assert adaptive_simpson(lambda x: x * x, 0.0, 1.0) == pytest.approx(1 / 3, rel=1e-12)
    assert adaptive_simpson(lambda x: x ** 3 - x, -2.0, 2.0) == pytest.approx(0.0, abs=1e-12)
    assert adaptive_simpson(math.sin, 0.0, math.pi) == pytest.approx(2.0, rel=1e-10)
    assert adaptive_simpson(math.exp, 0.0, 1.0) == pytest.approx(math.e - 1.0, rel=1e-10)
    assert adaptive_simpson(math.exp, 1.0, 1.0) == 0.0  # empty interval


def test_adaptive_simpson_spiky_integrand_matches_quad():
    f = lambda x: math.exp(-400.0 * (x - 0.5) ** 2)
    expected, _ = quad(f, 0.0, 1.0, limit=200)
    assert adaptive_simpson(f, 0.0, 1.0, rtol=1e-10) == pytest.approx(expected, rel=1e-8)


def test_theorem3_frozen_tau1_and_quad_oracle():
    tau1, upper = theorem3_bounds(1e-3, 2, 10.0, 0.5)
    assert tau1 == pytest.approx(T3_TAU1_CASE, abs=1e-12)
    # independent oracle: same drift formula but scipy quadrature
    d, c, k_min, eps = 2, 0.5, 10.0, 1e-3
    tau2 = (d / 2.0) * math.log2(math.e ** 2 * lemma1_constant(d) / (2.0 * eps))
    l = lambda x: prop1_lower(c, k_min, 2.0 ** (-x / d) / math.sqrt(2 * math.pi * math.e))
    integral, _ = quad(l, 0.0, tau2, limit=200)
    upper_oracle = tau2 + (tau2 + 1.0) / l(tau2) - integral / l(tau2)
    assert upper == pytest.approx(upper_oracle, rel=1e-9)
    assert tau1 < upper


def test_theorem3_second_case_matches_quad_oracle():
    d, c, k_min, eps = 3, 0.3, 5.0, 1e-4
    tau1, upper = theorem3_bounds(eps, d, k_min, c)
    assert tau1 == pytest.approx((d / 2.0) * math.log2(1.0 / (2 * math.pi * math.e * eps)),
                                 abs=1e-12)
    tau2 = (d / 2.0) * math.log2(math.e ** 2 * lemma1_constant(d) / (2.0 * eps))
    l = lambda x: prop1_lower(c, k_min, 2.0 ** (-x / d) / math.sqrt(2 * math.pi * math.e))
    integral, _ = quad(l, 0.0, tau2, limit=200)
    assert upper == pytest.approx(tau2 + (tau2 + 1.0) / l(tau2) - integral / l(tau2),
                                  rel=1e-9)


def test_theorem3_degenerate_floor_gives_infinite_upper():
    # c = 1 makes the per-query floor identically zero
    tau1, upper = theorem3_bounds(1e-3, 2, 10.0, 1.0)
    assert tau1 == pytest.approx(T3_TAU1_CASE, abs=1e-12)
    assert upper == math.inf
    with pytest.raises(ValueError):
        theorem3_bounds(-1e-3, 2, 10.0, 0.5)


def test_logistic_consistency_with_prop1():
    # prop1 at c k sigma / 2 = 4 reuses the frozen logistic value f(4)
    val = prop1_lower(0.5, 8.0, 2.0)
    f4 = 0.9820137900379085
    hb = -(f4 * math.log2(f4) + (1 - f4) * math.log2(1 - f4))
    assert val == pytest.approx((1 - hb) * 0.5, abs=1e-14)
    assert float(logistic(4.0)) == pytest.approx(f4, abs=1e-15)
