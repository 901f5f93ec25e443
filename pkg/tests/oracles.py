"""Independent reference implementations used only by the test suite.

Everything here recomputes results through a different route than the
library: full-permutation enumeration with midpoint evaluation for the
scheme's law, backtracking enumeration for allocation existence, and a
sort-the-whole-priority-list apportionment with its own threshold formulas.
Keeping these separate from the package is the point - a bug would have to
be made twice, in two different shapes, to go unnoticed.
"""

import itertools
import math
from fractions import Fraction

from seatlot.core import compute_quota


def interval_contains_integer(left: Fraction, right: Fraction) -> bool:
    """Direct definition: does [left, right) contain an integer?"""
    return math.ceil(left) < right


def indicators_at(u: Fraction, fracs) -> tuple:
    """Residual indicators at exact offset u, straight from the definition."""
    out = []
    pos = u
    for f in fracs:
        nxt = pos + f
        out.append(1 if interval_contains_integer(pos, nxt) else 0)
        pos = nxt
    return tuple(out)


def full_permutation_distribution(fracs) -> dict:
    """Law of the shuffled systematic scheme via all s! orderings.

    For each ordering the offset space is cut at every point where a
    cumulative sum crosses an integer; each open cell is evaluated at its
    midpoint (never a breakpoint), using pure Fraction arithmetic.
    """
    fracs = [Fraction(f) for f in fracs]
    s = len(fracs)
    law = {}
    total_weight = Fraction(0)
    for order in itertools.permutations(range(s)):
        cuts = {Fraction(0), Fraction(1)}
        c = Fraction(0)
        for i in order:
            c += fracs[i]
            cuts.add((-c) % 1)
        cuts = sorted(cuts)
        for left, right in zip(cuts, cuts[1:]):
            mid = (left + right) / 2
            ordered_bits = indicators_at(mid, [fracs[i] for i in order])
            bits = [0] * s
            for k, i in enumerate(order):
                bits[i] = ordered_bits[k]
            key = tuple(bits)
            w = right - left
            law[key] = law.get(key, Fraction(0)) + w
            total_weight += w
    return {k: v / math.factorial(s) for k, v in law.items() if v}


def fixed_order_distribution(fracs) -> dict:
    """Single-ordering law by the same midpoint method."""
    fracs = [Fraction(f) for f in fracs]
    cuts = {Fraction(0), Fraction(1)}
    c = Fraction(0)
    for f in fracs:
        c += f
        cuts.add((-c) % 1)
    cuts = sorted(cuts)
    law = {}
    for left, right in zip(cuts, cuts[1:]):
        mid = (left + right) / 2
        key = indicators_at(mid, fracs)
        law[key] = law.get(key, Fraction(0)) + (right - left)
    return law


def exists_allocation(lows, highs, total) -> bool:
    """Backtracking existence check for an integer vector in a box with a
    fixed sum."""
    lows = list(lows)
    highs = list(highs)

    def rec(i, remaining):
        if i == len(lows):
            return remaining == 0
        for a in range(lows[i], highs[i] + 1):
            if a > remaining:
                break
            if rec(i + 1, remaining - a):
                return True
        return False

    if any(lo > hi for lo, hi in zip(lows, highs)):
        return False
    return rec(0, total)


def exists_allocation_product(lows, highs, total) -> bool:
    """Tiny-case cross-check of exists_allocation via raw product scan."""
    ranges = [range(lo, hi + 1) for lo, hi in zip(lows, highs)]
    return any(sum(combo) == total for combo in itertools.product(*ranges))


def quota_bound_feasible(prob, bounds) -> bool:
    """Does any allocation satisfy quota and the lower bounds?  Brute force."""
    quota = compute_quota(prob)
    lows = [max(b, f) for b, f in zip(bounds, quota.floors)]
    highs = list(quota.ceilings)
    return exists_allocation(lows, highs, prob.seats)


def oracle_priority(rule_name: str, pop: int, seats_so_far: int):
    """Priority of a state's next seat, written from the threshold table
    directly (None means a guaranteed seat).  Squared for hill."""
    b = seats_so_far
    if rule_name == "adams":
        return None if b == 0 else Fraction(pop) / b
    if rule_name == "dean":
        if b == 0:
            return None
        harmonic = 2 / (Fraction(1, b) + Fraction(1, b + 1))
        return Fraction(pop) / harmonic
    if rule_name == "hill":
        return None if b == 0 else Fraction(pop) ** 2 / (b * (b + 1))
    if rule_name == "webster":
        return Fraction(pop) / (b + Fraction(1, 2))
    if rule_name == "jefferson":
        return Fraction(pop) / (b + 1)
    raise ValueError(rule_name)


def priority_list_apportion(prob, rule_name: str) -> tuple:
    """Apportion by sorting the complete priority list and taking the top
    seats (ties: larger population first, then earlier state)."""
    r = prob.seats
    s = prob.size
    entries = []
    for i, pop in enumerate(prob.populations):
        for b in range(r):
            value = oracle_priority(rule_name, pop, b)
            if value is None:
                key = (0, Fraction(0), -pop, i)
            else:
                key = (1, -value, -pop, i)
            entries.append((key, i))
    entries.sort(key=lambda e: e[0])
    seats = [0] * s
    for _key, i in entries[:r]:
        seats[i] += 1
    return tuple(seats)
