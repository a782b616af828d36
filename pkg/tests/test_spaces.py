import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conclab.spaces import (Event, SymmetricGroup, TooLargeError, enumerate_points, event_from_json,
                            indices_to_mask, make_space, mask_to_indices, measure_of, parse_space, sample_point,
                            trial_rng)


def test_uniform_cube():
    S = make_space([[0.5, 0.5]] * 3)
    assert S.n_points == 8
    assert np.allclose(S.masses(), 1 / 8)


def test_product_masses():
    S = make_space([[0.3, 0.7], [0.5, 0.5]])
    assert np.allclose(sorted(S.masses()), [0.15, 0.15, 0.35, 0.35])


def test_single_point_space():
    S = make_space([[1.0]] * 5)
    assert S.n_points == 1
    assert measure_of(S, Event(S, points=[(0,) * 5])) == pytest.approx(1.0)
    assert sample_point(S, trial_rng(123, 4)) == (0,) * 5


@pytest.mark.parametrize("bad", [[], [[0.5, 0.6]], [[1.2, -0.2]], [[0.0, 1.0]]])
def test_make_space_rejects(bad):
    with pytest.raises(ValueError):
        make_space(bad)


def test_measures():
    S = make_space([[0.5, 0.5]] * 3)
    assert measure_of(S, Event(S, points=[(0, 0, 0)])) == pytest.approx(1 / 8)
    assert measure_of(S, Event(S, mask=(1 << 8) - 1)) == pytest.approx(1.0)
    B = make_space([[0.7, 0.3]] * 2)
    assert measure_of(B, Event(B, points=[(1, 1)])) == pytest.approx(0.09)


def test_enumeration_order():
    assert [p for p, _ in enumerate_points(make_space([[0.5, 0.5]] * 2))] == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert [p for p, _ in enumerate_points(make_space([[1 / 3] * 3]))] == [(0,), (1,), (2,)]


def test_enumeration_cap():
    S = make_space([[0.5, 0.5]] * 25)
    with pytest.raises(TooLargeError):
        list(enumerate_points(S))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=1, max_size=5), st.data())
def test_index_round_trip(sizes, data):
    S = make_space([[1 / k] * k for k in sizes])
    i = data.draw(st.integers(0, S.n_points - 1))
    assert S.index_of(S.point_of(i)) == i
    assert tuple(S.points()[i]) == S.point_of(i)


@settings(max_examples=50)
@given(st.sets(st.integers(0, 60)))
def test_mask_round_trip(idx):
    assert set(mask_to_indices(indices_to_mask(idx)).tolist()) == idx


def test_rng_streams_deterministic():
    a = trial_rng(42, 7).random(5)
    b = trial_rng(42, 7).random(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, trial_rng(42, 8).random(5))


def test_sampling_frequency():
    S = make_space([[0.5, 0.5]])
    rng = trial_rng(0, 0)
    from conclab.spaces import sample_points

    freq = sample_points(S, rng, 10**6)[:, 0].mean()
    assert 0.498 <= freq <= 0.502


def test_symmetric_group():
    G = SymmetricGroup(3)
    assert G.n_points == 6
    assert [tuple(p) for p in G.points()][:2] == [(1, 2, 3), (1, 3, 2)]
    assert math.isclose(G.masses().sum(), 1.0)


def test_parse_space_shorthands():
    assert parse_space("uniform3^2").n_points == 9
    assert parse_space("bernoulli0.3^2").masses()[-1] == pytest.approx(0.09)
    assert parse_space("S_4").n_points == 24
    assert parse_space('{"factors": [[0.5, 0.5]]}').n_points == 2


def test_event_predicates():
    S = parse_space("uniform2^3")
    A = event_from_json(S, {"predicate": "sum-le-k", "k": 1})
    assert len(A) == 4
    assert (0, 0, 0) in A and (1, 1, 0) not in A
    with pytest.raises(ValueError):
        event_from_json(S, {"predicate": "sum-ge-k", "k": 9})
