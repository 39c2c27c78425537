"""Brute-force crossing count, independent of the sweep engine.

Two strands with s, s' > 0 and k < k' start with the younger one far to the
right (x -> infinity as t -> k'), so they cross before t = g exactly when the
older one is to the right at t = g.  A strand with s = 0 born at level k0
slides left past every older strand with s > 0.
"""

from __future__ import annotations

from fractions import Fraction


def strand_list(g: int) -> list[tuple[int, int]]:
    return [(k, s) for k in range(g) for s in range(3 * g - 2 - 3 * k)]


def crossing_pairs(g: int) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    pairs = []
    sts = strand_list(g)
    for a in sts:
        for b in sts:
            (k, s), (k2, s2) = a, b
            if not k < k2:
                continue
            if s > 0 and s2 > 0:
                if Fraction(s, g - k) > Fraction(s2, g - k2):
                    pairs.append((a, b))
            elif s2 == 0 and s > 0:
                pairs.append((a, b))
    return pairs


def crossing_count(g: int) -> int:
    if g < 2:
        raise ValueError(f"genus must be at least 2, got {g}")
    return len(crossing_pairs(g))
