import json
import math

import numpy as np
import pytest

from conclab import bounds, verify
from conclab.spaces import Event, parse_space, trial_rng

CUBE3 = parse_space("uniform2^3")


class Const:
    name = "const"

    def __init__(self, c):
        self.c = c

    def __call__(self, rng):
        return self.c


class Unif:
    name = "uniform"

    def __call__(self, rng):
        return rng.random()


def test_clopper_pearson_zero_count():
    for n in (10, 1000, 10**5):
        lo, hi = verify.clopper_pearson(0, n)
        assert lo == 0
        assert hi == pytest.approx(1 - 0.005 ** (1 / n), rel=1e-10)
    assert verify.clopper_pearson(7, 7)[1] == 1.0


def test_clopper_pearson_covers_binomial():
    # two-sided 99% interval: each tail probability at the endpoints is 0.005
    from scipy import stats

    lo, hi = verify.clopper_pearson(30, 200)
    assert stats.binom.sf(29, 200, lo) == pytest.approx(0.005, rel=1e-6)
    assert stats.binom.cdf(30, 200, hi) == pytest.approx(0.005, rel=1e-6)


def test_lower_median():
    assert verify.lower_median([4, 1, 3, 2]) == 2
    assert verify.lower_median([5, 1, 3]) == 3


def test_constant_statistic():
    est = verify.mc_tail(Const(3.0), [2.0, 4.0], 1000, seed=0, side="raw")
    assert est.estimates == [1.0, 0.0]
    assert est.median == 3.0


def test_uniform_statistic():
    est = verify.mc_tail(Unif(), [0.5], 10**5, seed=1, side="raw")
    assert abs(est.estimates[0] - 0.5) < 0.005


def test_mc_tail_needs_samples():
    with pytest.raises(ValueError):
        verify.mc_tail(Unif(), [0.5], 999, seed=0)


def test_mc_deterministic_across_workers():
    a = verify.mc_tail(Unif(), [0.1, 0.3], 2000, seed=5, workers=1)
    b = verify.mc_tail(Unif(), [0.1, 0.3], 2000, seed=5, workers=3)
    assert json.dumps(a.to_dict()) == json.dumps(b.to_dict())


def test_compare_rows():
    est = verify.mc_tail(Const(0.0), [0.5, 1.0, 2.0], 1000, seed=0, side="raw")
    rows, verdict = verify.compare_tail_to_bound(est, [2.0, 0.01, 1e-4])
    # 1e-4 sits below the zero-count floor at n=1000, so even a clean sample fails there
    assert verdict == "fail"
    assert rows[0]["vacuous"] and rows[0]["pass"]
    assert rows[1]["resolvable"] and rows[1]["pass"]
    assert not rows[2]["resolvable"] and not rows[2]["pass"]
    # a real violation: every sample exceeds 0.5 but the curve claims 0.1
    est = verify.mc_tail(Const(1.0), [0.5], 1000, seed=0, side="raw")
    rows, verdict = verify.compare_tail_to_bound(est, lambda u: 0.1)
    assert verdict == "fail" and rows[0]["resolvable"]
    with pytest.raises(ValueError):
        verify.compare_tail_to_bound(est, [0.1, 0.2])


def test_moment_whole_space_is_one():
    A = Event(CUBE3, mask=255)
    for fn in ("convex", "xi", "perm"):
        assert verify.exact_exp_moment(CUBE3, A, fn) == pytest.approx(1.0)
    assert verify.exact_exp_moment(CUBE3, A, "hamming", t=2.0) == pytest.approx(1.0)


def test_moment_examples():
    A = Event(CUBE3, points=[(0, 0, 0)])
    v = verify.exact_exp_moment(CUBE3, A, "hamming", t=math.log(2))
    assert v == pytest.approx(3.375, rel=1e-12)
    assert v <= bounds.a_of_t(math.log(2)) ** 3 / 0.125
    assert bounds.a_of_t(math.log(2)) == pytest.approx(1.125)
    c = verify.exact_exp_moment(CUBE3, A, "convex")
    ref = (1 + 3 * math.exp(0.25) + 3 * math.exp(0.5) + math.exp(0.75)) / 8
    assert c == pytest.approx(ref, rel=1e-12)
    assert c == pytest.approx(1.4894, abs=1e-4)


def test_moment_monotone_in_event():
    for i in range(50):
        rng = trial_rng(7, i)
        small = int(rng.integers(1, 256))
        big = small | int(rng.integers(0, 256))
        f = lambda m: verify.exact_exp_moment(CUBE3, Event(CUBE3, mask=m), "hamming", t=0.7)
        assert f(big) <= f(small) + 1e-12


def test_sweep_hamming_1020_rows():
    rep = verify.sweep_exact(CUBE3, "2.1.2", [0.25, 0.5, 1, 2], "all")
    assert len(rep.rows) == 1020
    assert rep.verdict == "pass"


def test_sweep_other_examples():
    rep = verify.sweep_exact(parse_space("uniform2^2"), "3.1.2", events="all", params={"q": 2})
    assert rep.verdict == "pass" and len(rep.rows) == 225
    rep = verify.sweep_exact(parse_space("bernoulli0.3^3"), "2.3.7", events="all", params={"p1": 0.5})
    assert rep.verdict == "pass" and len(rep.rows) == 255
    rep = verify.sweep_exact(CUBE3, "4.1.2", events="all")
    assert rep.verdict == "pass"


def test_sweep_detects_fault():
    from conclab.acceptance import injected_fault

    with injected_fault():
        rep = verify.sweep_exact(CUBE3, "2.1.2", [1.0], "all")
    assert rep.verdict == "fail" and rep.counterexamples


def test_sweep_caps():
    with pytest.raises(ValueError):
        verify.sweep_exact(parse_space("uniform2^5"), "4.1.2", events="all")
    with pytest.raises(ValueError):
        verify.sweep_exact(CUBE3, "9.9.9", events="all")


def test_sweep_deterministic_across_workers():
    a = verify.sweep_exact(CUBE3, "4.2.5", events="random(40, 3)", workers=1)
    b = verify.sweep_exact(CUBE3, "4.2.5", events="random(40, 3)", workers=2)
    assert a.to_json() == b.to_json()


def test_mc_agrees_with_enumeration():
    # P{hamming distance to {000} >= 2} on the cube is 4/8
    A = Event(CUBE3, points=[(0, 0, 0)])

    class Dist:
        name = "hamming"

        def __call__(self, rng):
            return float((rng.random(3) < 0.5).sum())

    est = verify.mc_tail(Dist(), [2.0], 20000, seed=9, side="raw")
    lo, hi = verify.clopper_pearson(est.counts[0], est.n)
    assert lo <= 0.5 <= hi
    assert verify.exact_exp_moment(CUBE3, A, "hamming", t=1.0) == pytest.approx(((1 + math.e) / 2) ** 3)


def test_csv_and_json():
    rep = verify.sweep_exact(CUBE3, "2.1.2", [0.5], "all")
    assert rep.to_csv().splitlines()[0].count(",") >= 2
    d = json.loads(rep.to_json())
    assert d["verdict"] == "pass" and len(d["rows"]) == 255
    assert verify.dumps({"x": np.float64(0.5), "y": np.int64(2)}) == verify.dumps({"x": 0.5, "y": 2})
