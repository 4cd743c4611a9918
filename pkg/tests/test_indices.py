import math
from itertools import product

import pytest
from hypothesis import given, strategies as st

from wcebridge.indices import (
    IndexRangeError,
    IndexSetSizeError,
    MultiIndex,
    enumerate_full,
    enumerate_table_a,
    singleton,
    zero_index,
)

# The published enumeration beyond the singletons (golden rows).
GOLDEN_TAIL = [
    (1, 1, 0),
    (1, 0, 1),
    (0, 1, 1),
    (2, 0, 0),
    (0, 2, 0),
    (0, 0, 2),
    (1, 2, 0),
    (2, 1, 0),
    (3, 0, 0),
    (0, 3, 0),
    (4, 0, 0),
    (0, 4, 0),
    (5, 0, 0),
    (0, 5, 0),
    (6, 0, 0),
    (0, 6, 0),
    (7, 0, 0),
    (0, 7, 0),
    (8, 0, 0),
    (0, 8, 0),
    (9, 0, 0),
    (0, 9, 0),
    (10, 0, 0),
    (0, 10, 0),
]


def dense(m: MultiIndex, width=3):
    return m.dense(width)


def test_order_examples():
    assert zero_index(5).order == 0
    assert MultiIndex.from_dense([1, 2], 5).order == 3


def test_decrement_examples():
    m = MultiIndex.from_dense([1], 4)
    assert m.decrement(1).is_zero()
    m = MultiIndex.from_dense([0, 2], 4)
    assert m.decrement(1) == m  # max{0-1, 0} leaves the entry absent
    m = MultiIndex.from_dense([2, 1], 4)
    assert dense(m.decrement(1)) == (1, 1, 0)


def test_decrement_range_error():
    m = MultiIndex.from_dense([1, 1], 4)
    with pytest.raises(IndexRangeError):
        m.decrement(0)
    with pytest.raises(IndexRangeError):
        m.decrement(5)


def test_factorial_product():
    assert zero_index(3).factorial_product() == 1
    assert MultiIndex.from_dense([1, 1], 3).factorial_product() == 1
    assert MultiIndex.from_dense([3, 2], 3).factorial_product() == 12


def test_table_a_trivial_truncations():
    assert [m.entries for m in enumerate_table_a(0, 5)] == [()]
    small = enumerate_table_a(1, 4)
    assert len(small) == 5
    assert [dense(m, 4) for m in small][1:] == [
        (1, 0, 0, 0),
        (0, 1, 0, 0),
        (0, 0, 1, 0),
        (0, 0, 0, 1),
    ]


def test_table_a_matches_golden_rows():
    table = enumerate_table_a(12, 6)
    tail = [dense(m) for m in table][1 + 6 :]
    assert tail == GOLDEN_TAIL
    # the order column of the published table
    assert [m.order for m in table][1 + 6 :] == [sum(r) for r in GOLDEN_TAIL]


def test_table_a_contains_required_vectors():
    table = enumerate_table_a(12, 3)
    got = {dense(m) for m in table}
    for need in [(1, 2, 0), (2, 1, 0), (10, 0, 0), (0, 10, 0)]:
        assert need in got


def test_table_a_truncates_by_order_and_support():
    assert [dense(m) for m in enumerate_table_a(2, 2)][3:] == [(1, 1, 0), (2, 0, 0), (0, 2, 0)]
    # L = 2 drops every row touching coordinate 3
    assert all(not m.entries or max(m.support) <= 2 for m in enumerate_table_a(12, 2))


def test_enumerate_full_counts():
    assert len(enumerate_full(1, 3)) == 4
    six = enumerate_full(2, 2)
    assert len(six) == 6
    assert {m.entries for m in six} == {
        (),
        ((1, 1),),
        ((2, 1),),
        ((1, 2),),
        ((1, 1), (2, 1)),
        ((2, 2),),
    }
    assert len(enumerate_full(2, 3)) == 10  # C(5, 2), checked below by brute force


@pytest.mark.parametrize("p,L", [(2, 3), (3, 2), (4, 3), (1, 5)])
def test_enumerate_full_against_brute_force(p, L):
    brute = {tup for tup in product(range(p + 1), repeat=L) if sum(tup) <= p}
    got = {m.dense(L) for m in enumerate_full(p, L)}
    assert got == brute
    assert len(enumerate_full(p, L)) == math.comb(L + p, p)


def test_enumerate_full_ordering_is_graded():
    orders = [m.order for m in enumerate_full(3, 3)]
    assert orders == sorted(orders)
    # within order 1, coordinate order ascending
    singles = [m for m in enumerate_full(3, 3) if m.order == 1]
    assert [m.support[0] for m in singles] == [1, 2, 3]


def test_enumerate_full_cap():
    with pytest.raises(IndexSetSizeError):
        enumerate_full(12, 100, cap=1000)


def test_table_a_subset_of_full():
    full = {m.entries for m in enumerate_full(4, 3)}
    assert {m.entries for m in enumerate_table_a(4, 3)} <= full


@given(st.lists(st.integers(min_value=0, max_value=6), min_size=1, max_size=6), st.data())
def test_decrement_properties(dense_row, data):
    m = MultiIndex.from_dense(dense_row, len(dense_row))
    k = data.draw(st.integers(min_value=1, max_value=len(dense_row)))
    lowered = m.decrement(k)
    if m.degree(k) >= 1:
        assert lowered.order == m.order - 1
    else:
        assert lowered == m
    # repeated decrements floor at zero
    reps = m.degree(k)
    cur = m
    for _ in range(reps + 1):
        cur = cur.decrement(k)
    again = cur.decrement(k)
    assert cur.degree(k) == 0 and again.degree(k) == 0


def test_position_lookup():
    table = enumerate_table_a(3, 4)
    for i, m in enumerate(table):
        assert table.position(m) == i
    assert table.singleton_count == 4


def test_l_zero_is_deterministic_truncation():
    only_zero = enumerate_table_a(12, 0)
    assert len(only_zero) == 1 and only_zero[0].is_zero()


def test_str_labels():
    assert str(zero_index(2)) == "0"
    assert str(MultiIndex.from_dense([2, 1], 3)) == "2e1+e2"
    assert str(singleton(3, 4)) == "e3"
