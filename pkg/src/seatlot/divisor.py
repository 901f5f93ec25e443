"""Deterministic apportionment: divisor methods, largest remainders,
quota-staying audits, and paradox detectors.

A divisor method fixes a rounding threshold between consecutive seat counts
and divides every population by a common price per seat, rounding at the
threshold; the price is tuned until the seats sum to the house size.  The
tuning is exact: it amounts to granting the house's seats to the largest
priority values population/threshold(seats so far), so no floating-point
search is involved.  Huntington-Hill's irrational threshold sqrt(b*(b+1))
is compared through squares, which is exact for the non-negative quantities
involved.

Ties between equal priorities are broken by larger population first, then
by input position; the rule is arbitrary but fixed, so results are
reproducible.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .core import Allocation, Problem, compute_quota
from .errors import InfeasibleError, InputError


@dataclass(frozen=True)
class DivisorRule:
    """A rounding rule for seat thresholds.

    ``rounds_up(x, b)`` decides exactly whether entitlement ``x`` with ``b``
    whole seats rounds to ``b + 1`` (strict: equality keeps the floor).
    ``priority(pop, b)`` is the comparable priority of a state's next seat
    after ``b``; ``None`` means infinite (a guaranteed first seat).  For
    rules compared through squares, priorities are the squared values, which
    preserves order.
    """

    name: str
    first_seat_guaranteed: bool
    squared_priority: bool
    rounds_up: Callable[[Fraction, int], bool] = field(compare=False)
    priority: Callable[[int, int], Optional[Fraction]] = field(compare=False)


def _smallest_divisors() -> DivisorRule:
    return DivisorRule(
        name="adams", first_seat_guaranteed=True, squared_priority=False,
        rounds_up=lambda x, b: x > b,
        priority=lambda pop, b: None if b == 0 else Fraction(pop, b),
    )


def _harmonic_means() -> DivisorRule:
    # Threshold 2*b*(b+1)/(2*b+1), the harmonic mean of b and b+1; its
    # b = 0 value is taken as 0, forcing a first seat.
    return DivisorRule(
        name="dean", first_seat_guaranteed=True, squared_priority=False,
        rounds_up=lambda x, b: x * (2 * b + 1) > 2 * b * (b + 1),
        priority=lambda pop, b: None if b == 0 else Fraction(
            pop * (2 * b + 1), 2 * b * (b + 1)),
    )


def _equal_proportions() -> DivisorRule:
    # Threshold sqrt(b*(b+1)); compared via squares.
    return DivisorRule(
        name="hill", first_seat_guaranteed=True, squared_priority=True,
        rounds_up=lambda x, b: x * x > b * (b + 1),
        priority=lambda pop, b: None if b == 0 else Fraction(
            pop * pop, b * (b + 1)),
    )


def _major_fractions() -> DivisorRule:
    return DivisorRule(
        name="webster", first_seat_guaranteed=False, squared_priority=False,
        rounds_up=lambda x, b: 2 * x > 2 * b + 1,
        priority=lambda pop, b: Fraction(2 * pop, 2 * b + 1),
    )


def _greatest_divisors() -> DivisorRule:
    return DivisorRule(
        name="jefferson", first_seat_guaranteed=False, squared_priority=False,
        rounds_up=lambda x, b: x > b + 1,
        priority=lambda pop, b: Fraction(pop, b + 1),
    )


RULES: dict[str, DivisorRule] = {
    rule.name: rule
    for rule in (_smallest_divisors(), _harmonic_means(),
                 _equal_proportions(), _major_fractions(),
                 _greatest_divisors())
}

DETERMINISTIC_METHODS = ("hamilton",) + tuple(RULES)


def lambda_allocation(prob: Problem, rule: DivisorRule,
                      divisor) -> tuple[int, ...]:
    """Per-state seats at a fixed price per seat (no tuning).

    Each population is divided by the price; the result keeps its floor
    unless it strictly exceeds the rule's threshold, in which case it rounds
    up.  Equality keeps the floor.
    """
    divisor = Fraction(divisor)
    if divisor <= 0:
        raise InputError(f"price per seat must be positive, got {divisor}")
    out = []
    for pop in prob.populations:
        x = Fraction(pop) / divisor
        b = math.floor(x)
        out.append(b + 1 if rule.rounds_up(x, b) else b)
    return tuple(out)


def divisor_apportion(prob: Problem, rule: DivisorRule) -> Allocation:
    """Tune the price per seat so the rounded seats sum to the house size.

    Implemented as exact selection of the house's largest priority values;
    the audit records the priority at the cut and the next one below it
    (any price strictly between them reproduces the allocation), squared
    for rules compared through squares.
    """
    s = prob.size
    r = prob.seats
    if rule.first_seat_guaranteed and r < s:
        raise InfeasibleError(
            f"{rule.name} grants every state a seat, impossible with "
            f"{r} seats for {s} states")
    seats = [0] * s
    if r == 0:
        return Allocation(seats=tuple(seats), method=rule.name,
                          audit={"cut_priority": None, "next_priority": None,
                                 "squared": rule.squared_priority})
    heap = []
    for i, pop in enumerate(prob.populations):
        heap.append(_priority_key(rule, pop, 0, i))
    heapq.heapify(heap)
    cut_key = None
    for _ in range(r):
        cut_key = heapq.heappop(heap)
        i = cut_key[3]
        seats[i] += 1
        heapq.heappush(
            heap, _priority_key(rule, prob.populations[i], seats[i], i))
    next_key = heap[0]
    audit = {
        "cut_priority": _key_priority(cut_key),
        "next_priority": _key_priority(next_key),
        "squared": rule.squared_priority,
    }
    return Allocation(seats=tuple(seats), method=rule.name, audit=audit)


def _priority_key(rule: DivisorRule, pop: int, b: int, index: int):
    # Min-heap key ordering: higher priority first, then larger population,
    # then lower index.  Infinite priorities sort before all finite ones.
    value = rule.priority(pop, b)
    if value is None:
        return (0, Fraction(0), -pop, index)
    return (1, -value, -pop, index)


def _key_priority(key) -> Optional[Fraction]:
    return None if key[0] == 0 else -key[1]


def divisor_with_bounds(prob: Problem, rule: DivisorRule,
                        bounds: Sequence[int]) -> Allocation:
    """Current-practice variant: grant each state its minimum, then let the
    divisor method continue from there.

    Every state starts with ``bounds[i]`` seats; the remaining seats go to
    the largest onward priorities among states whose quota strictly exceeds
    their minimum (states already at or above their quota stop competing).
    With a minimum of one seat and the equal-proportions rule this is the
    method used for the US House today.
    """
    from .core import broadcast_lower_bound

    bounds = broadcast_lower_bound(bounds, prob.size)
    granted = sum(bounds)
    if granted > prob.seats:
        raise InfeasibleError(
            f"minimum seats sum to {granted} > {prob.seats} seats")
    quota = compute_quota(prob)
    seats = list(bounds)
    residual = prob.seats - granted
    competitors = [i for i in range(prob.size)
                   if quota.quotas[i] > bounds[i]]
    if residual == 0:
        return Allocation(seats=tuple(seats), method=f"{rule.name}+bounds")
    if not competitors:
        raise InfeasibleError(
            "seats remain but every state already meets or exceeds its quota")
    heap = []
    for i in competitors:
        heap.append(_priority_key(rule, prob.populations[i], seats[i], i))
    heapq.heapify(heap)
    for _ in range(residual):
        key = heapq.heappop(heap)
        i = key[3]
        seats[i] += 1
        heapq.heappush(
            heap, _priority_key(rule, prob.populations[i], seats[i], i))
    return Allocation(seats=tuple(seats), method=f"{rule.name}+bounds")


def hamilton_apportion(prob: Problem) -> Allocation:
    """Largest remainders: floors, then one extra seat per largest fraction.

    Remainder ties go to the larger population, then to the earlier state.
    """
    quota = compute_quota(prob)
    seats = list(quota.floors)
    order = sorted(
        range(prob.size),
        key=lambda i: (-quota.fractional[i], -prob.populations[i], i))
    for i in order[:quota.residual_seats]:
        seats[i] += 1
    return Allocation(seats=tuple(seats), method="hamilton")


def resolve_method(method) -> tuple[str, Callable[[Problem], Allocation]]:
    """Turn a method name or callable into (name, problem -> Allocation)."""
    if callable(method):
        return getattr(method, "__name__", "custom"), method
    name = str(method)
    if name == "hamilton":
        return name, hamilton_apportion
    if name in RULES:
        rule = RULES[name]
        return name, lambda prob: divisor_apportion(prob, rule)
    raise InputError(f"unknown deterministic method {name!r}; "
                     f"expected one of {DETERMINISTIC_METHODS}")


@dataclass(frozen=True)
class ParadoxReport:
    """A re-verifiable paradox witness: the instances plus the moved states."""

    kind: str
    method: str
    witness: dict


def detect_alabama(prob: Problem, method,
                   r_values: Iterable[int]) -> list[ParadoxReport]:
    """Find states losing a seat when the house grows by one.

    Checks every pair (r, r+1) within ``r_values``; each losing state yields
    one report.
    """
    name, fn = resolve_method(method)
    rs = sorted(set(r_values))
    if not rs:
        raise InputError("empty house-size range")
    allocs = {}
    for r in rs:
        allocs[r] = fn(Problem(prob.labels, prob.populations, r)).seats
    reports = []
    for r in rs:
        if r + 1 not in allocs:
            continue
        for i in range(prob.size):
            if allocs[r + 1][i] < allocs[r][i]:
                reports.append(ParadoxReport(
                    kind="alabama", method=name,
                    witness={
                        "labels": list(prob.labels),
                        "populations": list(prob.populations),
                        "house_before": r,
                        "house_after": r + 1,
                        "state": i,
                        "label": prob.labels[i],
                        "seats_before": allocs[r][i],
                        "seats_after": allocs[r + 1][i],
                    }))
    return reports


def detect_population_paradox(before: Problem, after: Problem,
                              method) -> list[ParadoxReport]:
    """Find pairs where the faster-growing state loses a seat to the slower.

    Both problems must share the state list and house size.  Growth is
    compared as the exact ratio new/old population.
    """
    if before.labels != after.labels:
        raise InputError("population-paradox check needs identical state lists")
    if before.seats != after.seats:
        raise InputError("population-paradox check needs identical house sizes")
    name, fn = resolve_method(method)
    a_before = fn(before).seats
    a_after = fn(after).seats
    growth = [Fraction(after.populations[i], before.populations[i])
              for i in range(before.size)]
    reports = []
    for i in range(before.size):
        if a_after[i] >= a_before[i]:
            continue
        for j in range(before.size):
            if j == i or a_after[j] <= a_before[j]:
                continue
            if growth[i] > growth[j]:
                reports.append(ParadoxReport(
                    kind="population", method=name,
                    witness={
                        "labels": list(before.labels),
                        "populations_before": list(before.populations),
                        "populations_after": list(after.populations),
                        "seats": before.seats,
                        "loser": i,
                        "gainer": j,
                        "loser_growth": str(growth[i]),
                        "gainer_growth": str(growth[j]),
                        "loser_seats": [a_before[i], a_after[i]],
                        "gainer_seats": [a_before[j], a_after[j]],
                    }))
    return reports


def fair_share_seats(population: int, base: Problem) -> int:
    """Seats a joining state deserves at the base problem's price per seat,
    rounded to the nearest integer (halves up)."""
    exact = Fraction(population * base.seats, base.total_population)
    return math.floor(exact + Fraction(1, 2))


def detect_new_state_paradox(base: Problem, extended: Problem,
                             method) -> list[ParadoxReport]:
    """Find original states whose seats change when a new state joins.

    ``extended`` must append exactly one state to ``base`` and enlarge the
    house by that state's fair share at the old price.
    """
    if extended.size != base.size + 1:
        raise InputError("extended problem must add exactly one state")
    if (extended.labels[:-1] != base.labels
            or extended.populations[:-1] != base.populations):
        raise InputError("extended problem must preserve the original states")
    expected = base.seats + fair_share_seats(extended.populations[-1], base)
    if extended.seats != expected:
        raise InputError(
            f"extended house must be {expected} seats "
            f"(base plus the new state's fair share), got {extended.seats}")
    name, fn = resolve_method(method)
    a_base = fn(base).seats
    a_ext = fn(extended).seats
    reports = []
    for i in range(base.size):
        if a_ext[i] != a_base[i]:
            reports.append(ParadoxReport(
                kind="new_state", method=name,
                witness={
                    "labels": list(extended.labels),
                    "populations": list(extended.populations),
                    "house_before": base.seats,
                    "house_after": extended.seats,
                    "state": i,
                    "label": base.labels[i],
                    "seats_before": a_base[i],
                    "seats_after": a_ext[i],
                }))
    return reports


@dataclass(frozen=True)
class QuotaStayingSummary:
    method: str
    instances: int
    lower_violations: int
    upper_violations: int
    lower_witness: Optional[dict] = None
    upper_witness: Optional[dict] = None


def quota_staying_check(method, corpus: Sequence[Problem]) -> QuotaStayingSummary:
    """Count lower/upper quota violations of a method across a corpus."""
    if not corpus:
        raise InputError("empty corpus")
    name, fn = resolve_method(method)
    lower = upper = 0
    lower_witness = upper_witness = None
    for prob in corpus:
        quota = compute_quota(prob)
        seats = fn(prob).seats
        for i in range(prob.size):
            if seats[i] < quota.floors[i]:
                lower += 1
                if lower_witness is None:
                    lower_witness = {"populations": list(prob.populations),
                                     "seats": prob.seats, "state": i}
            if seats[i] > quota.ceilings[i]:
                upper += 1
                if upper_witness is None:
                    upper_witness = {"populations": list(prob.populations),
                                     "seats": prob.seats, "state": i}
    return QuotaStayingSummary(
        method=name, instances=len(corpus),
        lower_violations=lower, upper_violations=upper,
        lower_witness=lower_witness, upper_witness=upper_witness)
