import itertools
import math

import numpy as np
import pytest

from conclab.apps import binpack, fpp, spinglass, subseq, supsum
from conclab.spaces import trial_rng


# -- bin packing

def test_binpack_examples():
    assert binpack.binpack_size([0.6] * 3) == 3
    assert binpack.binpack_size([0.5] * 4) == 2
    assert binpack.binpack_size([0.5] * 4, "ffd") == 2
    with pytest.raises(ValueError):
        binpack.binpack_size([0.5, 1.2])
    with pytest.raises(ValueError):
        binpack.binpack_size([0.0])
    with pytest.raises(ValueError):
        binpack.binpack_size([0.1] * 33)


def test_binpack_exact_vs_oracle():
    for i in range(100):
        rng = trial_rng(20, i)
        s = 1 - rng.random(int(rng.integers(1, 13)))
        e = binpack.exact_bins(s)
        assert e == binpack.exact_bins_dp(s)
        assert e <= binpack.ffd(s) <= 2 * s.sum() + 1


def test_binpack_degenerate():
    rep = binpack.binpack_experiment(10, law="ones", samples=1000, seed=0, mode="exact", u_grid=(1, 20, 30))
    assert rep.verdict == "pass"
    assert rep.tails[0]["estimate"]["median"] == 10
    assert all(r["count"] == 0 for r in rep.rows)


def test_binpack_ffd_caveat():
    rep = binpack.binpack_experiment(40, samples=1000, seed=1, u_grid=(5, 10))
    assert rep.caveats and rep.verdict == "pass"


# -- subsequences

def test_lis_examples():
    assert subseq.lis_length([1, 2, 3]) == 3
    assert subseq.lis_length([3, 2, 1]) == 1
    assert subseq.lis_length([3, 1, 4, 1, 5, 9, 2, 6]) == subseq.lis_length_dp([3, 1, 4, 1, 5, 9, 2, 6]) == 4
    assert subseq.lis_length([]) == 0


def test_lis_matches_dp():
    for i in range(200):
        rng = trial_rng(21, i)
        x = rng.integers(0, 5, int(rng.integers(1, 40)))
        assert subseq.lis_length(x) == subseq.lis_length_dp(x)


def test_lcs_examples():
    enc = lambda s: [ord(c) for c in s]
    assert subseq.lcs_length(enc("abc"), enc("abc")) == 3
    assert subseq.lcs_length(enc("abc"), enc("xyz")) == 0
    assert subseq.lcs_length(enc("ABCBDAB"), enc("BDCABA")) == 4
    for i in range(100):
        rng = trial_rng(22, i)
        a, b = rng.integers(0, 3, int(rng.integers(0, 30))), rng.integers(0, 3, int(rng.integers(0, 30)))
        assert subseq.lcs_length(a, b) == subseq.lcs_length_dp(a, b)


def test_lis_single_element():
    rep = subseq.lis_experiment(N=1, samples=1000, seed=0, u_grid=(1, 2))
    assert rep.aux["median"] == 1
    assert all(r["count"] == 0 for r in rep.rows) and rep.verdict == "pass"


def test_lis_regeneration_deterministic():
    a = subseq.lis_experiment(N=50, samples=1000, seed=3, u_grid=(2, 4))
    b = subseq.lis_experiment(N=50, samples=1000, seed=3, u_grid=(2, 4))
    assert a.to_json() == b.to_json()
    c = subseq.lis_experiment(N=50, samples=1000, seed=4, u_grid=(2, 4))
    assert c.to_json() != a.to_json()


# -- sums

def test_supsum_examples():
    x = np.array([0.2, -0.9, 0.4, 0.1])
    fam = supsum.FamilySpec(np.ones((1, 4)) / 2, np.zeros(4))
    assert supsum.supsum_statistic(fam, x) == pytest.approx(x.sum() / 2)
    assert supsum.supsum_statistic(supsum.coordinate_family(4), x) == pytest.approx(0.9)
    two = supsum.FamilySpec(np.array([[1.0, 0, 0, 0], [0, 0, 1.0, 1.0]]), np.zeros(4))
    assert supsum.supsum_statistic(two, x) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        supsum.supsum_statistic(two, x[:3])


def test_family_constants():
    fam = supsum.block_family(12, 3)
    assert fam.sigma == pytest.approx(1.0)
    assert fam.tau == pytest.approx(1 / math.sqrt(3))
    assert supsum.singleton_family(9).sigma == pytest.approx(1.0)


def test_supsum_experiment_passes():
    rep = supsum.supsum_experiment(supsum.coordinate_family(20), samples=2000, seed=2)
    assert rep.verdict == "pass"


# -- first passage percolation

def test_fpp_unit_weights():
    n = 3
    H, W = fpp.grid_shape(n)
    wh, wv = np.ones((H - 1, W)), np.ones((H, W - 1))
    assert fpp.fpp_passage_time(n, wh, wv) == pytest.approx(n)


def test_fpp_huge_detour_weights():
    # blocking the straight row forces a detour through the next row
    n = 2
    H, W = fpp.grid_shape(n)
    wh, wv = np.ones((H - 1, W)), np.ones((H, W - 1))
    wv[0, :] = 1e6
    assert fpp.fpp_passage_time(n, wh, wv) == pytest.approx(n + 2)


def test_fpp_matches_bruteforce():
    for i in range(40):
        rng = trial_rng(23, i)
        n = int(rng.integers(1, 4))
        H, W = fpp.grid_shape(n)
        wh, wv = rng.exponential(size=(H - 1, W)), rng.exponential(size=(H, W - 1))
        assert fpp.fpp_passage_time(n, wh, wv) == pytest.approx(fpp.fpp_passage_time_bruteforce(n, wh, wv))


def test_fpp_rejects_bad_weights():
    H, W = fpp.grid_shape(2)
    with pytest.raises(ValueError):
        fpp.fpp_passage_time(2, -np.ones((H - 1, W)), np.ones((H, W - 1)))
    with pytest.raises(ValueError):
        fpp.fpp_passage_time(2, np.ones((H, W)), np.ones((H, W - 1)))


def test_fpp_report_is_ungraded():
    rep = fpp.fpp_experiment(4, samples=1000, seed=0)
    assert rep.verdict == "report"
    assert rep.aux["K_fit"] > 0


# -- spin glass

def _brute_logZ(cfg, h):
    N = cfg.N
    vals = []
    for eps in itertools.product((-1, 1), repeat=N):
        e = np.array(eps)
        vals.append(cfg.beta / math.sqrt(N) * sum(h[i, j] * e[i] * e[j] for i in range(N) for j in range(i + 1, N)))
    m = max(vals)
    # Z averages over the 2^N spin configurations
    return m + math.log(sum(math.exp(v - m) for v in vals)) - N * math.log(2)


@pytest.mark.parametrize("N", [3, 6, 7])
def test_spin_glass_bruteforce(N):
    cfg = spinglass.SpinGlassConfig(N, 0.8, "normal")
    h = cfg.draw(trial_rng(24, N))
    assert spinglass.spin_glass_logZ(cfg, h) == pytest.approx(_brute_logZ(cfg, h), rel=1e-12)


def test_spin_glass_trivial_cases():
    cfg = spinglass.SpinGlassConfig(10, 0.0, "normal")
    h = cfg.draw(trial_rng(0, 0))
    assert spinglass.spin_glass_logZ(cfg, h) == pytest.approx(0.0, abs=1e-12)
    cfg = spinglass.SpinGlassConfig(10, 0.7, "normal")
    assert spinglass.spin_glass_logZ(cfg, np.zeros((10, 10))) == pytest.approx(0.0, abs=1e-12)


def test_spin_glass_config_validation():
    with pytest.raises(ValueError):
        spinglass.SpinGlassConfig(30, 0.5)
    with pytest.raises(ValueError):
        spinglass.SpinGlassConfig(10, 1.5)
