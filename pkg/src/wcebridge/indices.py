"""Multi-index machinery for the chaos expansion.

A multi-index selects one chaos mode: entry ``m_k`` is the Hermite degree
attached to basis coordinate ``k``.  Indices are stored sparsely so that a
length bound of 10^4 (the largest truncation used in the experiments) costs
O(support), not O(L).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Iterator, Sequence


class IndexRangeError(ValueError):
    """Coordinate outside 1..L."""


class IndexSetSizeError(ValueError):
    """Requested exhaustive enumeration exceeds the configured cap."""


@dataclass(frozen=True)
class MultiIndex:
    """Finitely supported vector of Hermite degrees, sparse representation.

    ``entries`` holds (coordinate, multiplicity) pairs with coordinate >= 1
    and multiplicity >= 1, sorted by coordinate.  ``length_bound`` is the
    largest coordinate the index is allowed to touch.
    """

    entries: tuple[tuple[int, int], ...]
    length_bound: int

    def __post_init__(self):
        last = 0
        for k, mk in self.entries:
            if k <= last:
                raise ValueError("entries must be sorted by coordinate, no duplicates")
            if mk < 1:
                raise ValueError("stored multiplicities must be >= 1")
            if not 1 <= k <= self.length_bound:
                raise IndexRangeError(f"coordinate {k} outside 1..{self.length_bound}")
            last = k

    @classmethod
    def from_dense(cls, values: Sequence[int], length_bound: int | None = None) -> "MultiIndex":
        lb = length_bound if length_bound is not None else max(len(values), 1)
        entries = tuple((k, m) for k, m in enumerate(values, start=1) if m)
        return cls(entries, lb)

    def degree(self, k: int) -> int:
        for kk, mk in self.entries:
            if kk == k:
                return mk
        return 0

    @property
    def order(self) -> int:
        return sum(mk for _, mk in self.entries)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(k for k, _ in self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def decrement(self, k: int) -> "MultiIndex":
        """The index m^-(k): entry k lowered by one, floored at zero."""
        if not 1 <= k <= self.length_bound:
            raise IndexRangeError(f"coordinate {k} outside 1..{self.length_bound}")
        out = []
        for kk, mk in self.entries:
            if kk == k:
                if mk > 1:
                    out.append((kk, mk - 1))
            else:
                out.append((kk, mk))
        return MultiIndex(tuple(out), self.length_bound)

    def factorial_product(self) -> int:
        """m! = prod_k m_k!, exact integer arithmetic."""
        out = 1
        for _, mk in self.entries:
            out *= math.factorial(mk)
        return out

    def dense(self, width: int) -> tuple[int, ...]:
        out = [0] * width
        for k, mk in self.entries:
            if k <= width:
                out[k - 1] = mk
        return tuple(out)

    def __str__(self) -> str:
        if not self.entries:
            return "0"
        return "+".join(f"{mk}e{k}" if mk > 1 else f"e{k}" for k, mk in self.entries)


def zero_index(length_bound: int) -> MultiIndex:
    return MultiIndex((), length_bound)


def singleton(k: int, length_bound: int) -> MultiIndex:
    return MultiIndex(((k, 1),), length_bound)


# Rows of the published enumeration beyond the singletons, in table order.
# Orders 2 and 3 use the first three coordinates; orders 4..10 alternate the
# pure powers on coordinates 1 and 2.
_TABLE_TAIL: list[tuple[int, ...]] = [
    (1, 1),
    (1, 0, 1),
    (0, 1, 1),
    (2,),
    (0, 2),
    (0, 0, 2),
    (1, 2),
    (2, 1),
    (3,),
    (0, 3),
]
for _n in range(4, 11):
    _TABLE_TAIL.append((_n,))
    _TABLE_TAIL.append((0, _n))


@dataclass(frozen=True)
class IndexSet:
    """Ordered, duplicate-free collection of multi-indices.

    Element 0 is always the zero index.  ``scheme`` records how the set was
    built ("table-a" or "full").
    """

    indices: tuple[MultiIndex, ...]
    p: int
    L: int
    scheme: str

    def __post_init__(self):
        if not self.indices or not self.indices[0].is_zero():
            raise ValueError("element 0 must be the zero index")
        seen = set()
        for m in self.indices:
            if m.entries in seen:
                raise ValueError(f"duplicate index {m}")
            seen.add(m.entries)
            if m.order > self.p:
                raise ValueError(f"index {m} exceeds order bound {self.p}")
            if m.entries and m.entries[-1][0] > self.L:
                raise ValueError(f"index {m} exceeds length bound {self.L}")

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[MultiIndex]:
        return iter(self.indices)

    def __getitem__(self, i: int) -> MultiIndex:
        return self.indices[i]

    def position(self, m: MultiIndex) -> int:
        return self._lookup[m.entries]

    @property
    def _lookup(self) -> dict:
        # cached lazily on the instance despite frozen dataclass
        cache = self.__dict__.get("_lookup_cache")
        if cache is None:
            cache = {m.entries: i for i, m in enumerate(self.indices)}
            object.__setattr__(self, "_lookup_cache", cache)
        return cache

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(m.order for m in self.indices)

    @property
    def singleton_count(self) -> int:
        return sum(1 for m in self.indices if m.order == 1)

    @property
    def max_order(self) -> int:
        return max(self.orders)


def enumerate_table_a(p: int, L: int) -> IndexSet:
    """The published index enumeration: zero, the L singletons, then the
    fixed tail of higher-order vectors supported on the first coordinates,
    truncated at order <= p and support within 1..L.

    L = 0 yields the zero index alone (the deterministic truncation).
    """
    if p < 0 or L < 0:
        raise ValueError("need p >= 0 and L >= 0")
    out = [zero_index(L)]
    if p >= 1:
        out.extend(singleton(k, L) for k in range(1, L + 1))
    for row in _TABLE_TAIL:
        if sum(row) > p or len(row) > L:
            continue
        out.append(MultiIndex.from_dense(row, L))
    return IndexSet(tuple(out), p, L, "table-a")


def enumerate_full(p: int, L: int, cap: int = 10**6) -> IndexSet:
    """Every multi-index with support in 1..L and order <= p, graded order
    then lexicographic with earlier coordinates ranked first.  Intended for
    brute-force oracles at small p*L.
    """
    if p < 0 or L < 0:
        raise ValueError("need p >= 0 and L >= 0")
    total = math.comb(L + p, p)
    if total > cap:
        raise IndexSetSizeError(f"enumeration would produce {total} > cap {total if cap is None else cap}")
    out = [zero_index(L)]
    for n in range(1, p + 1):
        dense_rows = []
        for combo in combinations_with_replacement(range(1, L + 1), n):
            row = [0] * L
            for k in combo:
                row[k - 1] += 1
            dense_rows.append(tuple(row))
        dense_rows.sort(key=lambda row: tuple(-x for x in row))
        out.extend(MultiIndex.from_dense(row, L) for row in dense_rows)
    return IndexSet(tuple(out), p, L, "full")
