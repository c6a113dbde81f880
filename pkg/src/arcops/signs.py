"""Permutation and Koszul signs.

Every sign in the package is computed here, from explicit orderings of
homogeneous items, never from closed-form parity shortcuts.
"""
from __future__ import annotations

from typing import Hashable, Sequence


def permutation_sign(perm: Sequence[int]) -> int:
    """Sign of a permutation given in one-line notation (0-based)."""
    seen = [False] * len(perm)
    sign = 1
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def koszul_sign(source: Sequence[Hashable], target: Sequence[Hashable],
                degree=None) -> int:
    """Koszul sign of reordering homogeneous items from `source` to `target`.

    Both sequences must contain the same items exactly once.  `degree`
    maps an item to its degree; items of odd degree anticommute.  The
    default makes every item a line of degree one.

    >>> koszul_sign("abc", "bac")
    -1
    >>> koszul_sign("abc", "bac", degree=lambda x: 2)
    1
    """
    if len(source) != len(target) or set(source) != set(target):
        raise ValueError("source and target must be reorderings of each other")
    if degree is None:
        def degree(_):
            return 1
    position = {item: k for k, item in enumerate(target)}
    odd = [position[item] for item in source if degree(item) % 2]
    inversions = 0
    for a in range(len(odd)):
        for b in range(a + 1, len(odd)):
            if odd[a] > odd[b]:
                inversions += 1
    return -1 if inversions % 2 else 1


def shuffle_sign(first: Sequence[Hashable], second: Sequence[Hashable],
                 merged: Sequence[Hashable]) -> int:
    """Sign of the shuffle taking `first` followed by `second` to `merged`."""
    return koszul_sign(list(first) + list(second), merged)


def removal_sign(order: Sequence[Hashable], item: Hashable) -> int:
    """Sign of moving the degree one line of `item` to the front of `order`."""
    rest = [x for x in order if x != item]
    return koszul_sign(list(order), [item] + rest)
