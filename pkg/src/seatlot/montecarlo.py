"""Statistical verification lab: seeded simulation, fairness z-tests,
stochastic dominance, and monotonicity scans over exact marginals.

Every simulation is a pure function of (method, problem, master seed,
replicate count): replicate k draws from the stream seeded by
``child_seed(master_seed, k)``, and results are integer accumulations, so
any execution order - or backend - produces the identical report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import _backend
from .core import (Problem, QuotaVector, broadcast_lower_bound,
                   compute_quota)
from .divisor import resolve_method
from .errors import CapacityError, InputError
from .lowerbound import _composite_parts, iterate_lower_bound
from .rng import SeededSource, child_seed
from .stochastic import _common_numerators, exact_distribution
from .errors import InfeasibleError


@dataclass(frozen=True)
class SimulationReport:
    """Integer-exact summary of n seeded replicates."""

    method: str
    master_seed: int
    replicates: int
    labels: tuple[str, ...]
    seat_sums: tuple[int, ...]
    seat_sumsqs: tuple[int, ...]
    quota_violations: int
    bound_violations: int
    sum_mismatches: int = 0

    def mean(self, i: int) -> Fraction:
        return Fraction(self.seat_sums[i], self.replicates)

    def means(self) -> tuple[Fraction, ...]:
        return tuple(self.mean(i) for i in range(len(self.labels)))

    def variance(self, i: int) -> Fraction:
        """Sample variance of state i's seats (0 when n < 2)."""
        n = self.replicates
        if n < 2:
            return Fraction(0)
        return Fraction(n * self.seat_sumsqs[i] - self.seat_sums[i] ** 2,
                        n * (n - 1))

    def std_error(self, i: int) -> float:
        return math.sqrt(self.variance(i) / self.replicates)


def _stochastic_inputs(prob: Problem, lower_bounds):
    quota = compute_quota(prob)
    if lower_bounds is None:
        bounds = (0,) * prob.size
        floors, fracs = list(quota.floors), list(quota.fractional)
        method = "stochastic"
    else:
        bounds = broadcast_lower_bound(lower_bounds, prob.size)
        trace = iterate_lower_bound(quota, bounds, prob.seats)
        if not trace.feasible:
            raise InfeasibleError(
                f"no allocation satisfies quota with the given bounds: "
                f"{trace.diagnostics}", diagnostics=trace.diagnostics,
                trace=trace)
        floors, fracs = _composite_parts(trace)
        method = "stochastic-lower-bound"
    return quota, bounds, floors, fracs, method


def simulate(method, prob: Problem, master_seed: int, n: int,
             lower_bounds=None) -> SimulationReport:
    """Run n independent replicates of a method and tally exactly.

    ``method`` is ``"stochastic"``, a deterministic method name, or a
    callable ``(problem, source) -> Allocation``.  Reports per-state seat
    sums and sums of squares plus counts of replicates violating quota or
    the lower bounds.
    """
    if n < 1:
        raise InputError("replicate count must be at least 1")
    if method == "stochastic":
        quota, bounds, floors, fracs, name = _stochastic_inputs(
            prob, lower_bounds)
        nums, den = _common_numerators(fracs)
        sums, sumsqs, qviol, bviol, mismatches, _masks = _backend.simulate_batch(
            floors, nums, den, list(quota.floors), list(quota.ceilings),
            list(bounds), master_seed, n, prob.seats)
        return SimulationReport(
            method=name, master_seed=master_seed, replicates=n,
            labels=prob.labels, seat_sums=tuple(sums),
            seat_sumsqs=tuple(sumsqs), quota_violations=qviol,
            bound_violations=bviol, sum_mismatches=mismatches)
    quota = compute_quota(prob)
    bounds = ((0,) * prob.size if lower_bounds is None
              else broadcast_lower_bound(lower_bounds, prob.size))
    if callable(method):
        name = getattr(method, "__name__", "custom")
        sums = [0] * prob.size
        sumsqs = [0] * prob.size
        qviol = bviol = mismatches = 0
        for k in range(n):
            src = SeededSource(child_seed(master_seed, k))
            seats = method(prob, src).seats
            bad_quota = bad_bound = False
            for i, a in enumerate(seats):
                sums[i] += a
                sumsqs[i] += a * a
                if not quota.floors[i] <= a <= quota.ceilings[i]:
                    bad_quota = True
                if a < bounds[i]:
                    bad_bound = True
            qviol += bad_quota
            bviol += bad_bound
            mismatches += sum(seats) != prob.seats
        return SimulationReport(
            method=name, master_seed=master_seed, replicates=n,
            labels=prob.labels, seat_sums=tuple(sums),
            seat_sumsqs=tuple(sumsqs), quota_violations=qviol,
            bound_violations=bviol, sum_mismatches=mismatches)
    # Deterministic methods: one evaluation, scaled by n (identical to the
    # replicate loop since every replicate ignores its stream).
    name, fn = resolve_method(method)
    seats = fn(prob).seats
    bad_quota = any(not quota.floors[i] <= seats[i] <= quota.ceilings[i]
                    for i in range(prob.size))
    bad_bound = any(seats[i] < bounds[i] for i in range(prob.size))
    return SimulationReport(
        method=name, master_seed=master_seed, replicates=n,
        labels=prob.labels,
        seat_sums=tuple(n * a for a in seats),
        seat_sumsqs=tuple(n * a * a for a in seats),
        quota_violations=n if bad_quota else 0,
        bound_violations=n if bad_bound else 0,
        sum_mismatches=n if sum(seats) != prob.seats else 0)


def empirical_distribution(prob: Problem, master_seed: int, n: int,
                           lower_bounds=None) -> dict[tuple[int, ...], int]:
    """Allocation -> count over n seeded replicates of the scheme."""
    if prob.size > 16:
        raise CapacityError("empirical distribution tracking supports at most 16 states")
    quota, bounds, floors, fracs, _name = _stochastic_inputs(
        prob, lower_bounds)
    nums, den = _common_numerators(fracs)
    _sums, _sumsqs, _qv, _bv, _mm, masks = _backend.simulate_batch(
        floors, nums, den, list(quota.floors), list(quota.ceilings),
        list(bounds), master_seed, n, prob.seats)
    out = {}
    for mask, count in enumerate(masks):
        if count:
            seats = tuple(f + ((mask >> i) & 1)
                          for i, f in enumerate(floors))
            out[seats] = out.get(seats, 0) + count
    return dict(sorted(out.items()))


def fairness_test(report: SimulationReport, quota: QuotaVector,
                  z=4) -> tuple[bool, ...]:
    """Per-state pass/fail: |empirical mean - quota| <= z standard errors.

    The comparison is exact (rational arithmetic on the squared inequality).
    Zero-variance states pass only on exact equality.
    """
    if report.labels and len(report.labels) != quota.size:
        raise InputError("report and quota vector differ in length")
    z = Fraction(z)
    n = report.replicates
    out = []
    for i, q in enumerate(quota.quotas):
        if n == 1:
            out.append(Fraction(report.seat_sums[i]) == q)
            continue
        lhs = (Fraction(report.seat_sums[i]) - n * q) ** 2 * (n - 1)
        rhs = z * z * (n * report.seat_sumsqs[i] - report.seat_sums[i] ** 2)
        out.append(lhs <= rhs)
    return tuple(out)


def stochastic_dominance(lower: dict, upper: dict) -> bool:
    """True iff ``lower`` is stochastically at most ``upper``.

    Both arguments are exact marginal laws (seat count -> probability); the
    test is the pointwise CDF comparison CDF(lower) >= CDF(upper).
    """
    support = sorted(set(lower) | set(upper))
    c_lower = c_upper = Fraction(0)
    for x in support:
        c_lower += lower.get(x, 0)
        c_upper += upper.get(x, 0)
        if c_lower < c_upper:
            return False
    return True


@dataclass(frozen=True)
class ProblemPair:
    """Two problems differing by one population move or one extra seat."""

    before: Problem
    after: Problem
    moved_from: Optional[int] = None
    moved_to: Optional[int] = None


@dataclass
class MonotonicityReport:
    kind: str
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def monotonicity_scan(pairs: Sequence[ProblemPair], kind: str,
                      *, limit: int = 8) -> MonotonicityReport:
    """Exact-marginal dominance verdicts over a corpus of problem pairs.

    ``population_move`` checks that the losing state's seat law does not
    rise and the gaining state's does not fall; ``house_increase`` checks
    every state's law is non-decreasing.  Dominance is computed from exact
    distributions, not coupled sampling; any failure is recorded with a full
    witness.
    """
    if kind not in ("population_move", "house_increase"):
        raise InputError(f"unknown monotonicity kind {kind!r}")
    report = MonotonicityReport(kind=kind)
    for pair in pairs:
        law_before = exact_distribution(pair.before, limit=limit)
        law_after = exact_distribution(pair.after, limit=limit)
        if kind == "population_move":
            checks = []
            if pair.moved_from is not None:
                checks.append((pair.moved_from, "after_at_most_before",
                               law_after.marginal_law(pair.moved_from),
                               law_before.marginal_law(pair.moved_from)))
            if pair.moved_to is not None:
                checks.append((pair.moved_to, "after_at_least_before",
                               law_before.marginal_law(pair.moved_to),
                               law_after.marginal_law(pair.moved_to)))
        else:
            if (pair.before.populations != pair.after.populations
                    or pair.after.seats != pair.before.seats + 1):
                raise InputError(
                    "house_increase pairs must share populations and differ "
                    "by one seat")
            checks = [(i, "after_at_least_before",
                       law_before.marginal_law(i), law_after.marginal_law(i))
                      for i in range(pair.before.size)]
        report.checked += 1
        for state, direction, lower, upper in checks:
            if not stochastic_dominance(lower, upper):
                report.failures.append({
                    "state": state,
                    "direction": direction,
                    "before_populations": list(pair.before.populations),
                    "after_populations": list(pair.after.populations),
                    "seats": (pair.before.seats, pair.after.seats),
                })
    return report


def random_problem(src: SeededSource, *, min_states: int = 1,
                   max_states: int = 6, max_population: int = 60,
                   max_seats: int = 30, min_seats: int = 0) -> Problem:
    """Uniform-ish random instance for scan corpora; deterministic in src."""
    s = min_states + src.randbelow(max_states - min_states + 1)
    pops = tuple(1 + src.randbelow(max_population) for _ in range(s))
    seats = min_seats + src.randbelow(max_seats - min_seats + 1)
    labels = tuple(f"S{i + 1}" for i in range(s))
    return Problem(labels, pops, seats)


def population_move_pair(src: SeededSource, **kwargs) -> ProblemPair:
    """Random pair: same totals, some heads moved from one state to another."""
    while True:
        before = random_problem(src, min_states=2, **kwargs)
        movable = [i for i, p in enumerate(before.populations) if p >= 2]
        if movable:
            break
    i = movable[src.randbelow(len(movable))]
    j = src.randbelow(before.size - 1)
    if j >= i:
        j += 1
    m = 1 + src.randbelow(before.populations[i] - 1)
    pops = list(before.populations)
    pops[i] -= m
    pops[j] += m
    after = Problem(before.labels, tuple(pops), before.seats)
    return ProblemPair(before=before, after=after, moved_from=i, moved_to=j)


def house_increase_pair(src: SeededSource, **kwargs) -> ProblemPair:
    before = random_problem(src, **kwargs)
    after = Problem(before.labels, before.populations, before.seats + 1)
    return ProblemPair(before=before, after=after)
