"""Perfect matchings and binary splits of index positions.

Positions are 1-based throughout, matching the i1..i2k labels used elsewhere.
"""

from itertools import combinations
from math import comb
from typing import Iterator, NamedTuple

from .errors import OddRankError, RangeError, SizeCapError

DEFAULT_CAP = 16


class Pairing(NamedTuple):
    """A perfect matching of positions ``1..2k``.

    ``pairs`` holds ``(p, q)`` tuples with ``p < q``, sorted by ``p``.
    """

    pairs: tuple

    def positions(self):
        return sorted(p for pair in self.pairs for p in pair)


class SplitAssignment(NamedTuple):
    longitudinal_positions: tuple
    transverse_positions: tuple


def double_factorial(m: int) -> int:
    """Return ``m!!`` with the conventions ``0!! = (-1)!! = 1``."""
    result = 1
    while m > 1:
        result *= m
        m -= 2
    return result


def check_rank(count: int, cap: int | None = None) -> None:
    if count % 2:
        raise OddRankError(f"rank {count} is odd")
    cap = DEFAULT_CAP if cap is None else cap
    if count > cap:
        raise SizeCapError(
            f"rank {count} exceeds the cap {cap} "
            f"({double_factorial(count - 1)} pairings); raise the cap explicitly"
        )


def _matchings(items: tuple) -> Iterator[tuple]:
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for j, partner in enumerate(rest):
        remaining = rest[:j] + rest[j + 1:]
        for tail in _matchings(remaining):
            yield ((first, partner),) + tail


def iter_pairings(count: int, cap: int | None = None, items=None) -> Iterator[tuple]:
    """Yield raw canonical pair tuples in lexicographic order.

    If ``items`` is given the matchings are over those objects (in the given
    order) instead of the positions ``1..count``.
    """
    check_rank(count, cap)
    if items is None:
        items = tuple(range(1, count + 1))
    elif len(items) != count:
        raise RangeError(f"expected {count} items, got {len(items)}")
    return _matchings(tuple(items))


def enumerate_pairings(count: int, cap: int | None = None) -> list[Pairing]:
    """All ``(count-1)!!`` perfect matchings of ``1..count``.

    ``count=0`` yields the single empty matching.
    """
    return [Pairing(p) for p in iter_pairings(count, cap)]


def enumerate_splits(k: int, r: int) -> list[SplitAssignment]:
    """All ways to mark ``r`` of the positions ``1..k`` as longitudinal."""
    if not 0 <= r <= k:
        raise RangeError(f"need 0 <= r <= k, got r={r}, k={k}")
    positions = range(1, k + 1)
    out = []
    for chosen in combinations(positions, r):
        chosen_set = set(chosen)
        out.append(SplitAssignment(chosen, tuple(p for p in positions if p not in chosen_set)))
    assert len(out) == comb(k, r)
    return out
