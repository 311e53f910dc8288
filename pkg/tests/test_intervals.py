"""Interval-union algebra checked against boolean masks on a fine grid."""
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rdsmeta.intervals import IntervalUnion, as_fraction

Q = 24


def mask(U):
    """Cells [k/Q, (k+1)/Q) covered by U (valid when endpoints lie on the grid)."""
    return np.array([U.contains(Fraction(k, Q)) for k in range(Q)])


pieces = st.lists(st.tuples(st.integers(0, Q), st.integers(0, Q)), max_size=5).map(
    lambda ps: IntervalUnion((Fraction(a, Q), Fraction(b, Q)) for a, b in ps))


@given(pieces, pieces)
@settings(max_examples=100, deadline=None)
def test_union_intersection_difference(U, V):
    assert np.array_equal(mask(U | V), mask(U) | mask(V))
    assert np.array_equal(mask(U & V), mask(U) & mask(V))
    assert np.array_equal(mask(U - V), mask(U) & ~mask(V))


@given(pieces)
@settings(max_examples=100, deadline=None)
def test_complement_and_measure(U):
    assert np.array_equal(mask(U.complement()), ~mask(U))
    assert U.measure() == Fraction(int(mask(U).sum()), Q)
    assert U.measure() + U.complement().measure() == 1


@given(pieces, pieces)
@settings(max_examples=100, deadline=None)
def test_canonical_equality(U, V):
    assert (U == V) == bool(np.array_equal(mask(U), mask(V)))
    assert U.issubset(U | V) and (U & V).issubset(U)


@given(pieces)
@settings(max_examples=50, deadline=None)
def test_pieces_sorted_disjoint(U):
    ps = U.pieces
    assert all(a < b for a, b in ps)
    assert all(b0 < a1 for (_, b0), (a1, _) in zip(ps, ps[1:]))


@given(pieces, st.lists(st.integers(0, 10 * Q - 1), min_size=1, max_size=20))
@settings(max_examples=50, deadline=None)
def test_contains_array_matches_contains(U, ks):
    xs = [Fraction(k, 10 * Q) for k in ks]
    assert U.contains_array([float(x) for x in xs]).tolist() == [U.contains(x) for x in xs]


def test_merge_touching():
    assert IntervalUnion([(0, "1/2"), ("1/2", 1)]) == IntervalUnion.full()
    assert len(IntervalUnion([(0, "1/3"), ("1/4", "1/2")])) == 1


def test_half_open():
    U = IntervalUnion([("1/2", 1)])
    assert U.contains(Fraction(1, 2)) and not U.contains(Fraction(1, 4))
    assert not IntervalUnion([(0, "1/2")]).contains(Fraction(1, 2))


def test_from_mask():
    cuts = [Fraction(k, 4) for k in range(5)]
    assert IntervalUnion.from_mask(cuts, [1, 1, 0, 1]) == IntervalUnion([(0, "1/2"), ("3/4", 1)])
    assert not IntervalUnion.from_mask(cuts, [0, 0, 0, 0])


def test_empty_and_repr():
    E = IntervalUnion.empty()
    assert not E and E.measure() == 0 and "empty" in repr(E)
    assert IntervalUnion([(0, "1/2")]).to_list() == [["0", "1/2"]]


@pytest.mark.parametrize("x,expected", [("3/5", Fraction(3, 5)), (2, Fraction(2)), (0.5, Fraction(1, 2)),
                                        (np.int64(3), Fraction(3))])
def test_as_fraction(x, expected):
    assert as_fraction(x) == expected
