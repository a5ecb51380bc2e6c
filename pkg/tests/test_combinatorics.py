import pytest
from hypothesis import given, strategies as st
from math import comb

from isotensor.combinatorics import (
    Pairing,
    double_factorial,
    enumerate_pairings,
    enumerate_splits,
    iter_pairings,
)
from isotensor.errors import OddRankError, RangeError, SizeCapError

from oracles import pairings_by_permutation


@pytest.mark.parametrize("m, expected", [(0, 1), (-1, 1), (1, 1), (5, 15), (6, 48), (11, 10395)])
def test_double_factorial(m, expected):
    assert double_factorial(m) == expected


def test_pairings_small():
    assert enumerate_pairings(2) == [Pairing(((1, 2),))]
    assert [p.pairs for p in enumerate_pairings(4)] == [
        ((1, 2), (3, 4)),
        ((1, 3), (2, 4)),
        ((1, 4), (2, 3)),
    ]
    assert len(enumerate_pairings(6)) == 15


def test_pairings_empty_set():
    # the rank-0 tensor is the scalar 1: one empty matching
    assert enumerate_pairings(0) == [Pairing(())]


@pytest.mark.parametrize("count", [2, 4, 6, 8])
def test_pairings_match_permutation_oracle(count):
    ours = {frozenset(p.pairs) for p in enumerate_pairings(count)}
    assert ours == pairings_by_permutation(count)


@pytest.mark.parametrize("count", [2, 4, 6, 8, 10, 12])
def test_pairing_count_and_canonical_form(count):
    pairings = enumerate_pairings(count)
    assert len(pairings) == double_factorial(count - 1)
    assert len(set(pairings)) == len(pairings)
    assert pairings == sorted(pairings)
    for p in pairings:
        assert sorted(p.positions()) == list(range(1, count + 1))
        assert all(a < b for a, b in p.pairs)
        assert [a for a, _ in p.pairs] == sorted(a for a, _ in p.pairs)


def test_pairing_errors():
    with pytest.raises(OddRankError):
        enumerate_pairings(5)
    with pytest.raises(SizeCapError):
        enumerate_pairings(18)
    with pytest.raises(SizeCapError):
        enumerate_pairings(6, cap=4)


def test_iter_pairings_over_custom_items():
    got = list(iter_pairings(4, items=("a", "b", "c", "d")))
    assert got[0] == (("a", "b"), ("c", "d"))
    assert len(got) == 3


@pytest.mark.parametrize("k, r, size", [(3, 1, 3), (4, 2, 6), (2, 0, 1)])
def test_split_sizes(k, r, size):
    splits = enumerate_splits(k, r)
    assert len(splits) == size


def test_split_all_transverse():
    (s,) = enumerate_splits(2, 0)
    assert s.longitudinal_positions == ()
    assert s.transverse_positions == (1, 2)


@given(st.integers(1, 9))
def test_splits_sum_to_power_of_two(k):
    total = 0
    for r in range(k + 1):
        splits = enumerate_splits(k, r)
        assert len(splits) == comb(k, r)
        for s in splits:
            assert set(s.longitudinal_positions).isdisjoint(s.transverse_positions)
            assert sorted(s.longitudinal_positions + s.transverse_positions) == list(range(1, k + 1))
        total += len(splits)
    assert total == 2 ** k


@pytest.mark.parametrize("k, r", [(3, -1), (3, 4)])
def test_split_range_error(k, r):
    with pytest.raises(RangeError):
        enumerate_splits(k, r)
