import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conclab import distances as D
from conclab.spaces import Event, make_space, parse_space, trial_rng

CUBE3 = parse_space("uniform2^3")
SQ = parse_space("uniform2^2")


def ev(space, *pts):
    return Event(space, points=list(pts))


def test_hamming_examples():
    assert D.hamming_distance(CUBE3, ev(CUBE3, (1, 0, 1)), (1, 0, 1)) == 0
    assert D.hamming_distance(CUBE3, ev(CUBE3, (0, 0, 0)), (1, 0, 1)) == 2
    assert D.hamming_distance(CUBE3, ev(CUBE3, (0, 0, 0)), (1, 0, 1), [5, 1, 1]) == 6


def test_one_sided_examples():
    A = ev(CUBE3, (0, 1, 1))
    assert D.one_sided_distance(CUBE3, A, (0, 0, 0)) == 0
    assert D.one_sided_distance(CUBE3, ev(CUBE3, (0, 0, 0)), (1, 1, 0)) == 2
    assert D.one_sided_distance(CUBE3, A, (1, 1, 0)) == 1


def test_penalty_examples():
    S = parse_space("uniform3^2")
    h = np.abs(np.subtract.outer(np.arange(3), np.arange(3))).astype(float)
    k = D.PenaltyKernel(h, np.full(3, 1 / 3))
    assert D.penalty_distance(S, ev(S, (0, 0)), (2, 1), k) == 3
    assert D.penalty_distance(S, ev(S, (2, 1)), (2, 1), k) == 0
    hk = D.PenaltyKernel.discrete(np.full(3, 1 / 3), 1.0)
    A = ev(S, (0, 0), (1, 2))
    for x in S.points():
        assert D.penalty_distance(S, A, tuple(x), hk) == D.hamming_distance(S, A, tuple(x))


def test_q_point_examples():
    assert D.q_point_distance(SQ, [ev(SQ, (0, 0)), ev(SQ, (0, 0))], (1, 1)) == 2
    assert D.q_point_distance(SQ, [ev(SQ, (0, 1), (1, 0))] * 2, (1, 1)) == 0
    assert D.q_point_distance(SQ, [ev(SQ, (1, 1)), ev(SQ, (0, 0))], (1, 1)) == 0


def test_min_norm_examples():
    r = D.min_norm_point(np.array([[1.0, 1.0]]))
    assert np.allclose(r.s, [1, 1]) and r.value == pytest.approx(2)
    r = D.min_norm_point(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(r.s, [0.5, 0.5]) and r.value == pytest.approx(0.5)
    r = D.min_norm_point(np.array([[0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]))
    assert np.allclose(r.s, [0.5, 0.5], atol=1e-9)


def test_convex_examples():
    assert D.convex_distance(SQ, ev(SQ, (1, 1)), (1, 1)).distance == 0
    assert D.convex_distance(SQ, ev(SQ, (0, 0)), (1, 1)).distance == pytest.approx(math.sqrt(2))
    r = D.convex_distance(SQ, ev(SQ, (0, 0), (1, 1)), (0, 1))
    assert r.distance == pytest.approx(1 / math.sqrt(2))
    assert r.gap <= 1e-9
    w = sum(c for _, c in r.support)
    assert w == pytest.approx(1)


def test_xi_examples():
    assert D.xi_distance(SQ, ev(SQ, (0, 1)), (0, 1), 1.0) == 0
    assert D.xi_distance(SQ, ev(SQ, (0, 0)), (1, 1), 1.0) == pytest.approx(2 * math.log(2))


def test_perm_examples():
    assert D.perm_convex_distance([(1, 2, 3)], (1, 2, 3)).value == 0
    assert D.perm_convex_distance([(1, 2, 3)], (2, 1, 3)).value == pytest.approx(2)
    assert D.perm_convex_distance([(2, 1, 3), (1, 3, 2)], (2, 3, 1)).value == pytest.approx(1.5)
    with pytest.raises(ValueError):
        D.perm_convex_distance([(1, 1, 3)], (1, 2, 3))


def test_convex_matches_projection():
    for i in range(300):
        rng = trial_rng(101, i)
        N = int(rng.integers(1, 7))
        S = parse_space(f"uniform2^{N}")
        k = int(rng.integers(1, min(3, 2 ** N) + 1))
        Y = S.points()[rng.choice(2 ** N, size=k, replace=False)]
        x = S.points()[int(rng.integers(2 ** N))]
        got = D.convex_distance(S, Event(S, points=[tuple(y) for y in Y]), x).value
        assert got == pytest.approx(D.projection_oracle((Y != x).astype(float)), abs=1e-9)


def test_xi_lower_bound_by_convex():
    for i in range(100):
        rng = trial_rng(102, i)
        N = int(rng.integers(1, 6))
        S = parse_space(f"uniform2^{N}")
        idx = rng.choice(2 ** N, size=int(rng.integers(1, min(6, 2 ** N) + 1)), replace=False)
        A = Event(S, points=[tuple(p) for p in S.points()[idx]])
        x = tuple(S.points()[int(rng.integers(2 ** N))])
        fc2 = D.convex_distance(S, A, x).value
        for a in (1.0, 2.0):
            assert D.xi_distance(S, A, x, a) >= a / (2 * (a + 1)) * fc2 - 1e-6


def test_q_point_matches_bruteforce():
    for i in range(200):
        rng = trial_rng(103, i)
        S = parse_space(f"uniform{int(rng.integers(2, 4))}^{int(rng.integers(1, 4))}")
        pts = S.points()
        evs = [Event(S, points=[tuple(p) for p in pts[rng.choice(len(pts), int(rng.integers(1, min(4, len(pts)) + 1)),
                                                                 replace=False)]])
               for _ in range(int(rng.integers(2, 4)))]
        x = pts[int(rng.integers(len(pts)))]
        assert D.q_point_distance(S, evs, x) == D.q_point_distance_bruteforce(evs, x)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.data())
def test_hamming_monotone_in_event(N, data):
    S = parse_space(f"uniform2^{N}")
    n = 2 ** N
    small = data.draw(st.sets(st.integers(0, n - 1), min_size=1, max_size=n))
    extra = data.draw(st.sets(st.integers(0, n - 1)))
    x = tuple(S.points()[data.draw(st.integers(0, n - 1))])
    A = Event(S, mask=sum(1 << i for i in small))
    B = Event(S, mask=sum(1 << i for i in small | extra))
    assert D.hamming_distance(S, B, x) <= D.hamming_distance(S, A, x)
    assert (D.hamming_distance(S, A, x) == 0) == (x in A)
    assert D.convex_distance(S, B, x).value <= D.convex_distance(S, A, x).value + 1e-9


def test_minimal_masks():
    mins, rows = D.minimal_masks(np.array([0b011, 0b001, 0b110, 0b001, 0b100]))
    assert sorted(mins) == [0b001, 0b100]


def test_kernel_validation():
    with pytest.raises(ValueError):
        D.PenaltyKernel(np.ones((2, 2)), [0.5, 0.5])
    with pytest.raises(ValueError):
        D.PenaltyKernel(-np.ones((2, 2)) + np.eye(2), [0.5, 0.5])


def test_bad_point_rejected():
    with pytest.raises(ValueError):
        D.hamming_distance(CUBE3, ev(CUBE3, (0, 0, 0)), (0, 2, 0))


def test_biased_space_does_not_change_distance():
    S = make_space([[0.9, 0.1]] * 3)
    assert D.hamming_distance(S, ev(S, (0, 0, 0)), (1, 0, 1)) == 2
