import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import optimize

from conclab import bounds
from conclab.distances import PenaltyKernel


def test_a_of_t_values():
    assert bounds.a_of_t(0) == 1
    assert bounds.a_of_t(1) == pytest.approx(0.5 + (math.e + 1 / math.e) / 4, abs=1e-12)
    for t in np.linspace(0, 3, 61):
        assert bounds.a_of_t(t) <= math.exp(t * t / 4) + 1e-12


def test_hamming_tail_value():
    bv = bounds.hamming_tail(0.5, 20, 100)
    assert bv.value == pytest.approx(2 * math.exp(-4), rel=1e-12)
    assert bv.value == pytest.approx(0.0366313, abs=1e-7)
    zero = bounds.hamming_tail(0.5, 0, 100)
    assert zero.value == 2 and zero.vacuous and "vacuous" in zero.note


def test_weighted_tail_scaling():
    unit = bounds.hamming_tail(0.4, 3, 10)
    scaled = bounds.hamming_tail(0.4, profile=[2.0] * 10, u=6)
    assert scaled.value == pytest.approx(unit.value, rel=1e-12)


def test_sharpened_tail():
    bv = bounds.sharpened_tail(100, 0.5, 20)
    thr = math.sqrt(50 * math.log(2))
    assert bv.value == pytest.approx(math.exp(-0.02 * (20 - thr) ** 2), rel=1e-12)
    assert bv.value == pytest.approx(0.0186202, abs=1e-7)
    assert bounds.sharpened_tail(100, 0.5, thr).value == pytest.approx(1.0)


def test_sharpened_alpha_matches_minimizer():
    # independent oracle: minimize the moment-bound exponent over alpha numerically
    N, pA, k = 100, 0.5, 20
    obj = lambda a: -a * math.log(pA) - 2 * k * k / (N * (1 + 1 / a))
    ref = optimize.minimize_scalar(obj, bounds=(1, 20), method="bounded", options={"xatol": 1e-12}).x
    got = bounds.sharpened_tail(N, pA, k).extra["alpha_opt"]
    assert got == pytest.approx(ref, abs=1e-6)
    assert got == pytest.approx(-1 + math.sqrt(800 / (100 * math.log(2))), abs=1e-12)


def test_two_point_b():
    for a in (1, 2, 3.5):
        for p in (0.1, 0.3):
            assert bounds.two_point_b(a, 0, p) == pytest.approx(1)
            assert bounds.two_point_b(a, 0.7, p) == pytest.approx(bounds.two_point_b(a, 0.7, 1 - p), rel=1e-12)
    assert bounds.two_point_b(1, 1, 0.5) == pytest.approx(bounds.a_of_t(1), abs=1e-12)


def test_two_point_tail_identity():
    N, pA, k = 100, 0.5, 20
    assert bounds.two_point_tail(N, pA, k, 0.5).value == pytest.approx(bounds.sharpened_tail(N, pA, k).value,
                                                                          rel=1e-10)
    kk = math.sqrt(2 * 0.3 * 0.7 * N * math.log(1 / pA))
    assert bounds.two_point_tail(N, pA, kk, 0.3).value == pytest.approx(1.0)


def test_one_sided_base():
    assert bounds.one_sided_moment_base(0.3, 0.5) == pytest.approx(7 / 3)
    assert bounds.one_sided_moment_base(0.2, 0.8) == pytest.approx(16)
    assert bounds.one_sided_moment_base(0.3, 0.3 + 1e-9) == pytest.approx(1, abs=1e-6)


def test_penalty_bounds():
    zero = PenaltyKernel(np.zeros((2, 2)), [0.5, 0.5])
    assert bounds.penalty_moment(zero, 5, 0.25, 0.7).value == pytest.approx(4)
    k1 = PenaltyKernel.discrete([0.5, 0.5], 1.0)
    assert bounds.penalty_integral(k1) == pytest.approx(0.5 * (1 + math.e))
    assert bounds.penalty_tail(k1, 5, 0.25, 0).value == pytest.approx(4)
    with pytest.raises(bounds.IntegrabilityError):
        bounds.penalty_tail(PenaltyKernel.discrete([0.5, 0.5], 1.2), 5, 0.25, 1.0)


def test_q_point():
    assert bounds.q_point_tail(2, 3, 0.5).value == pytest.approx(0.5)
    assert bounds.q_point_tail(3, 0, 0.5).value == pytest.approx(8)
    for q in (2, 5, 10):
        assert bounds.solve_a_q_alpha(q, 1.0) == pytest.approx(q, abs=1e-10)
    q = 10
    assert bounds.solve_a_q_alpha(q, math.log(q)) >= 1 + (1 - 1 / math.e) * q * math.log(q) - 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 8), st.floats(1, 6))
def test_a_q_alpha_root(q, alpha):
    x = bounds.solve_a_q_alpha(q, alpha)
    assert x > 1
    assert x + q * alpha * x ** (-1 / alpha) == pytest.approx(1 + q * alpha, rel=1e-10)


def test_xi_values():
    for a in (1, 2, 5):
        assert bounds.xi(a, 0) == 0
        assert bounds.xi(a, 1) == pytest.approx(math.log1p(a), abs=1e-14)
    assert bounds.xi(2, 0.5) == pytest.approx(-math.log(2) + 2 * math.log(1.5), abs=1e-12)
    assert bounds.xi(2, 0.5) == pytest.approx(0.117783, abs=1e-6)


@pytest.mark.parametrize("alpha", [1.0, 2.0, 5.0])
def test_xi_convex_increasing(alpha):
    u = np.arange(0, 1001) / 1000
    v = bounds.xi_vec(alpha, u)
    assert (np.diff(v) >= -1e-15).all()
    assert (np.diff(v, 2) >= -1e-12).all()
    assert (v >= alpha * u * u / (2 * (alpha + 1)) - 1e-15).all()


def test_convex_tails():
    assert bounds.convex_tail(0.5, 4).value == pytest.approx(2 * math.exp(-4))
    big = bounds.convex_tail(1.0, 1.3, "alpha", 1e6)
    assert math.log(big.value) == pytest.approx(-1.3 ** 2 / 2, abs=1e-5)
    thr = math.sqrt(2 * math.log(2))
    assert bounds.convex_tail(0.5, thr, "optimized").value == pytest.approx(1.0)


@pytest.mark.parametrize("fn", [
    lambda u: bounds.hamming_tail(0.3, u, 20).value,
    lambda u: bounds.sharpened_tail(20, 0.3, 3.5 + u).value,
    lambda u: bounds.two_point_tail(20, 0.3, 3 + u, 0.2).value,
    lambda u: bounds.q_point_tail(3, u, 0.3).value,
    lambda u: bounds.q_point_tail(3, u, 0.3, "sharpened").value,
    lambda u: bounds.convex_tail(0.3, u).value,
    lambda u: bounds.convex_tail(0.3, 2 + u, "optimized").value,
    lambda u: bounds.penalty_bernstein(PenaltyKernel.discrete([0.5, 0.5], 1.0), 10, 0.3, u).value,
])
def test_tails_nonincreasing(fn):
    vals = [fn(u) for u in np.linspace(0, 6, 61)]
    assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))


def test_query_validation():
    with pytest.raises(ValueError):
        bounds.BoundQuery(pA=0)
    with pytest.raises(ValueError):
        bounds.BoundQuery(alpha=0.5)
