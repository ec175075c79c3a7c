"""Exhaustive enumeration oracles for small instances.

Everything here is exact rational arithmetic over explicit label sets, kept
deliberately independent of the library's log-space / block-count code paths.
"""

from fractions import Fraction
from itertools import combinations
from math import comb


def enum_hypergeom(population: int, successes: int, draws: int) -> dict:
    """Law of the type-1 count among ``draws`` objects, by enumerating every
    draw subset of the population."""
    counts: dict[int, int] = {}
    for subset in combinations(range(population), draws):
        c = sum(1 for i in subset if i < successes)
        counts[c] = counts.get(c, 0) + 1
    total = comb(population, draws)
    return {j: Fraction(c, total) for j, c in counts.items()}


def enum_transition_row(n: int, k: int, x: int) -> dict:
    """One-step law from state x by enumerating all C(n,k)^2 pairs of swap
    selections (one k-subset of left-urn labels, one of right-urn labels,
    red labels sorted first in each urn)."""
    selections = list(combinations(range(n), k))
    a_counts = [sum(1 for i in sel if i < x) for sel in selections]
    b_counts = [sum(1 for i in sel if i < n - x) for sel in selections]
    counts: dict[int, int] = {}
    for a in a_counts:
        for b in b_counts:
            y = x - a + b
            counts[y] = counts.get(y, 0) + 1
    total = comb(n, k) ** 2
    return {y: Fraction(c, total) for y, c in counts.items()}


def enum_coupled_joint(n: int, k: int, x: int, y: int) -> dict:
    """Joint law of one shared-selection coupled step from (x, y) by
    enumerating all C(n,k)^2 equally likely (A, B) label-set pairs."""
    selections = list(combinations(range(n), k))
    counts: dict[tuple[int, int], int] = {}
    for sel_a in selections:
        ax = sum(1 for i in sel_a if i < x)
        ay = sum(1 for i in sel_a if i < y)
        for sel_b in selections:
            bx = sum(1 for i in sel_b if i < n - x)
            by = sum(1 for i in sel_b if i < n - y)
            key = (x - ax + bx, y - ay + by)
            counts[key] = counts.get(key, 0) + 1
    total = comb(n, k) ** 2
    return {key: Fraction(c, total) for key, c in counts.items()}


def block_joint_law(n: int, k: int, x: int, y: int) -> dict:
    """Joint law of the simulator's block-count step, computed exactly from
    the two multivariate hypergeometric selection laws."""
    lo, hi = min(x, y), max(x, y)
    total = comb(n, k) ** 2
    law: dict[tuple[int, int], int] = {}
    for a1 in range(min(lo, k) + 1):
        for a2 in range(min(hi - lo, k - a1) + 1):
            if k - a1 - a2 < 0:
                continue
            wa = comb(lo, a1) * comb(hi - lo, a2) * comb(n - hi, k - a1 - a2)
            if wa == 0:
                continue
            for b1 in range(min(n - hi, k) + 1):
                for b2 in range(min(hi - lo, k - b1) + 1):
                    if k - b1 - b2 < 0:
                        continue
                    wb = (comb(n - hi, b1) * comb(hi - lo, b2)
                          * comb(lo, k - b1 - b2))
                    if wb == 0:
                        continue
                    new_lo = lo - a1 + b1 + b2
                    new_hi = hi - a1 - a2 + b1
                    key = (new_hi, new_lo) if x > y else (new_lo, new_hi)
                    law[key] = law.get(key, 0) + wa * wb
    return {key: Fraction(c, total) for key, c in law.items()}


def marginals(joint: dict) -> tuple[dict, dict]:
    """X- and Y-marginals of a joint law over integer pairs."""
    mx: dict[int, Fraction] = {}
    my: dict[int, Fraction] = {}
    for (x, y), w in joint.items():
        mx[x] = mx.get(x, Fraction(0)) + w
        my[y] = my.get(y, Fraction(0)) + w
    return mx, my
