"""The compiled and pure-Python kernels agree."""
import numpy as np
import pytest

from conclab import kernels
from conclab.spaces import trial_rng

py = kernels.backend("python")
try:
    cy = kernels.backend("compiled")
except ImportError:  # pragma: no cover
    cy = None

needs_compiled = pytest.mark.skipif(cy is None, reason="extension not built")


def test_backend_flag():
    assert kernels.BACKEND in ("compiled", "python")


@needs_compiled
def test_lis_parity():
    for i in range(300):
        rng = trial_rng(1, i)
        x = rng.integers(0, 6, int(rng.integers(0, 60))).astype(float)
        assert kernels.lis_length(x, cy) == kernels.lis_length(x, py)


@needs_compiled
def test_lcs_parity():
    for i in range(200):
        rng = trial_rng(2, i)
        a = rng.integers(0, 3, int(rng.integers(0, 80)))
        b = rng.integers(0, 3, int(rng.integers(0, 80)))
        assert kernels.lcs_length(a, b, cy) == kernels.lcs_length(a, b, py)


@needs_compiled
def test_lcs_parity_multiword():
    # several 64-bit words, so carries cross word boundaries
    for i in range(60):
        rng = trial_rng(6, i)
        k = int(rng.integers(1, 6))
        a = rng.integers(-3, k, int(rng.integers(60, 400)))
        b = rng.integers(-3, k, int(rng.integers(1, 400)))
        assert kernels.lcs_length(a, b, cy) == kernels.lcs_length(a, b, py)
    assert kernels.lcs_length(np.zeros(200, int), np.zeros(150, int), cy) == 150
    assert kernels.lcs_length("ABCBDAB", "BDCABA", cy) == 4


@needs_compiled
def test_ffd_parity():
    for i in range(200):
        rng = trial_rng(3, i)
        s = 1 - rng.random(int(rng.integers(1, 60)))
        assert kernels.ffd_bins(s, cy) == kernels.ffd_bins(s, py)


@needs_compiled
def test_passage_parity():
    for i in range(50):
        rng = trial_rng(4, i)
        H, W = int(rng.integers(2, 8)), int(rng.integers(2, 8))
        wh, wv = rng.random((H - 1, W)), rng.random((H, W - 1))
        src = (int(rng.integers(H)), int(rng.integers(W)))
        dst = (int(rng.integers(H)), int(rng.integers(W)))
        assert kernels.grid_passage_time(wh, wv, src, dst, cy) == pytest.approx(
            kernels.grid_passage_time(wh, wv, src, dst, py), abs=1e-12)


def _brute_sweep(E, m, mr, which, alpha, C):
    K, n, _ = E.shape
    viol = np.zeros(C.size, dtype=int)
    worst = np.full(C.size, np.inf)
    for mask in range(1, 1 << n):
        idx = [j for j in range(n) if mask >> j & 1]
        M = E[:, :, idx].min(axis=2)
        lhs = M @ m
        pr = mr[idx].sum()
        for k in range(C.size):
            rhs = C[k] * pr ** (-alpha[k])
            rel = (rhs - lhs[which[k]]) / max(rhs, 1.0)
            viol[k] += rel < -1e-9
            worst[k] = min(worst[k], rel)
    return viol, worst


@pytest.mark.parametrize("impl", ["python", "compiled"])
def test_subset_sweep_bruteforce(impl):
    if impl == "compiled" and cy is None:
        pytest.skip("extension not built")
    mod = kernels.backend(impl)
    for i in range(6):
        rng = trial_rng(5, i)
        n = int(rng.integers(2, 9))
        E = rng.random((2, n, n)) * 3
        for k in range(2):
            np.fill_diagonal(E[k], 1.0)
        m = rng.random(n)
        m /= m.sum()
        which = np.array([0, 1, 0])
        alpha = np.array([1.0, 2.0, 1.5])
        C = np.array([1.0, 1.5, 0.3])
        count, viol, worst, _ = kernels.subset_sweep(E, m, m, which, alpha, C, impl=mod)
        bv, bw = _brute_sweep(E, m, m, which, alpha, C)
        assert count == 2 ** n - 1
        assert np.array_equal(viol, bv)
        assert np.allclose(worst, bw, atol=1e-12)
