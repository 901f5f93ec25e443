"""Apportionment under per-state minimum-seat requirements.

A state whose quota falls below its required minimum is over-represented by
force, so no fully fair scheme exists.  The approach here: grant every such
state (and every state whose quota equals its bound) exactly its bound, then
rescale the remaining states' quotas by a common ratio so they share the
remaining seats with equal representation per head.  When rescaling pushes
some state below its lower quota, that state is pinned at its lower quota
and the rescaling is repeated on the survivors; the iteration ends within
one round per state, and it ends with a usable quota vector precisely when
an allocation satisfying both quota and the bounds exists at all.

Two documented non-solutions are implemented for study alongside the real
scheme: ``resample_until_quota`` (rerun the scheme until the outcome
satisfies quota - the conditioning biases the expectations) and
``scaled_fractional_quota`` (shrink all fractional quotas by one factor -
simpler, but the resulting expectations are no longer proportional).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .core import (Allocation, Problem, QuotaVector, as_fractions,
                   compute_quota, validate_lower_bound)
from .errors import InfeasibleError, InputError
from .rng import SeededSource, U53_DENOMINATOR
from .stochastic import (AllocationDistribution, _scheme_draw,
                         residual_distribution)


def _quota_values(quota) -> tuple[Fraction, ...]:
    if isinstance(quota, QuotaVector):
        return quota.quotas
    return as_fractions(quota)


@dataclass(frozen=True)
class StateClassification:
    """Partition of states by quota relative to bound, all comparisons exact."""

    small: tuple[int, ...]      # quota strictly below bound
    exact: tuple[int, ...]      # quota equal to bound
    surplus: tuple[int, ...]    # quota strictly above bound
    remaining_seats: int        # seats left after granting small+exact their bounds


def classify(quota, bounds: Sequence[int], seats: int) -> StateClassification:
    """Split states into small / exact / surplus against their bounds.

    Raises :class:`InfeasibleError` when a bound exceeds its state's upper
    quota or the bounds alone overflow the house, naming the condition.
    """
    quotas = _quota_values(quota)
    bounds = validate_lower_bound(bounds, len(quotas))
    over = [i for i, (q, b) in enumerate(zip(quotas, bounds))
            if b > math.ceil(q)]
    if over:
        raise InfeasibleError(
            f"lower bound exceeds upper quota for states {over}",
            diagnostics={"condition": "bound_above_upper_quota", "states": over})
    if sum(bounds) > seats:
        raise InfeasibleError(
            f"lower bounds sum to {sum(bounds)} > {seats} seats",
            diagnostics={"condition": "bounds_exceed_house",
                         "total_bound": sum(bounds), "seats": seats})
    small, exact, surplus = [], [], []
    for i, (q, b) in enumerate(zip(quotas, bounds)):
        if q < b:
            small.append(i)
        elif q == b:
            exact.append(i)
        else:
            surplus.append(i)
    granted = sum(bounds[i] for i in small + exact)
    return StateClassification(tuple(small), tuple(exact), tuple(surplus),
                               seats - granted)


@dataclass(frozen=True)
class AdjustedQuota:
    """Equal-representation quotas for the surplus states.

    ``values[k]`` is ``scale * quota`` for surplus state ``indices[k]``;
    the scale is the remaining seats divided by the surplus states' total
    quota, so the values sum to the remaining seats exactly.  ``offenders``
    are surplus states whose scaled value fell below their lower quota.
    ``scale`` is None for value sets supplied from outside rather than
    produced by rescaling.
    """

    scale: Optional[Fraction]
    indices: tuple[int, ...]
    values: tuple[Fraction, ...]
    original_floors: tuple[int, ...]
    original_ceilings: tuple[int, ...]
    condition_holds: bool
    offenders: tuple[int, ...]


def adjusted_quota_from_values(original, values,
                               indices: Optional[Sequence[int]] = None
                               ) -> AdjustedQuota:
    """Wrap externally supplied (original quota, adjusted value) pairs.

    Used to audit published tables: offender status and gaps are recomputed
    from the given numbers, no rescaling is performed.
    """
    original = as_fractions(original)
    values = as_fractions(values)
    if len(original) != len(values):
        raise InputError("original and adjusted vectors differ in length")
    if indices is None:
        indices = tuple(range(len(original)))
    else:
        indices = tuple(indices)
        if len(indices) != len(original):
            raise InputError("indices and value vectors differ in length")
    floors = tuple(math.floor(q) for q in original)
    ceils = tuple(math.ceil(q) for q in original)
    offenders = tuple(i for i, v, f in zip(indices, values, floors) if v < f)
    return AdjustedQuota(
        scale=None, indices=indices, values=values,
        original_floors=floors, original_ceilings=ceils,
        condition_holds=not offenders, offenders=offenders)


def equal_representation_quota(cls_: StateClassification,
                               quota) -> AdjustedQuota:
    quotas = _quota_values(quota)
    if not cls_.surplus:
        raise InputError("no surplus states to rescale")
    total = sum((quotas[i] for i in cls_.surplus), Fraction(0))
    scale = Fraction(cls_.remaining_seats) / total
    values = tuple(scale * quotas[i] for i in cls_.surplus)
    floors = tuple(math.floor(quotas[i]) for i in cls_.surplus)
    ceils = tuple(math.ceil(quotas[i]) for i in cls_.surplus)
    offenders = tuple(i for i, v, f in zip(cls_.surplus, values, floors)
                      if v < f)
    return AdjustedQuota(
        scale=scale,
        indices=cls_.surplus,
        values=values,
        original_floors=floors,
        original_ceilings=ceils,
        condition_holds=not offenders,
        offenders=offenders,
    )


@dataclass(frozen=True)
class ViolationBound:
    """Probability bound for running the scheme on offender-bearing values.

    ``verbatim`` applies the summand max(1, gap) per offender; ``union`` uses
    min(1, gap), which is what each offender's actual failure probability
    equals, so ``union`` is the attainable union bound.  Both are reported;
    with at most one offender the true violation probability equals
    ``union`` exactly.
    """

    verbatim: Fraction
    union: Fraction
    gaps: tuple[tuple[int, Fraction], ...]
    exact_for_single_offender: bool


def violation_probability_bound(adjusted: AdjustedQuota) -> ViolationBound:
    verbatim = Fraction(0)
    union = Fraction(0)
    gaps = []
    for i, v, f in zip(adjusted.indices, adjusted.values,
                       adjusted.original_floors):
        if v < f:
            gap = f - v
            gaps.append((i, gap))
            verbatim += max(Fraction(1), gap)
            union += min(Fraction(1), gap)
    return ViolationBound(
        verbatim=verbatim,
        union=union,
        gaps=tuple(gaps),
        exact_for_single_offender=len(gaps) <= 1,
    )


@dataclass(frozen=True)
class IterationRound:
    active: tuple[int, ...]
    scale: Fraction
    fixed: tuple[int, ...]


@dataclass(frozen=True)
class IterationTrace:
    """Record of the rescale-and-pin iteration.

    When feasible, ``final_quota`` is the full-length composite vector:
    bound values on small/exact states, lower quotas on pinned states, and
    rescaled values on the surviving active states; it sums to the house
    size and every entry lies within [lower quota, upper quota].
    """

    classification: Optional[StateClassification]
    rounds: tuple[IterationRound, ...]
    final_active: tuple[int, ...]
    fixed_at_floor: tuple[int, ...]
    final_quota: Optional[tuple[Fraction, ...]]
    feasible: bool
    diagnostics: Optional[str] = None


def iterate_lower_bound(quota, bounds: Sequence[int],
                        seats: int) -> IterationTrace:
    """Run the rescaling iteration to a composite quota vector or a verdict.

    All offenders of a round are pinned simultaneously before the ratio is
    recomputed, which keeps the outcome independent of state order.  The
    trace reports infeasibility instead of raising.
    """
    quotas = _quota_values(quota)
    try:
        bounds = validate_lower_bound(bounds, len(quotas))
        cls_ = classify(quotas, bounds, seats)
    except (InfeasibleError, InputError) as exc:
        return IterationTrace(
            classification=None, rounds=(), final_active=(),
            fixed_at_floor=(), final_quota=None, feasible=False,
            diagnostics=str(exc))
    floors = [math.floor(q) for q in quotas]
    ceils = [math.ceil(q) for q in quotas]
    active = list(cls_.surplus)
    fixed: list[int] = []
    rounds: list[IterationRound] = []
    values: dict[int, Fraction] = {}
    while active:
        numerator = cls_.remaining_seats - sum(floors[i] for i in fixed)
        total = sum((quotas[i] for i in active), Fraction(0))
        scale = Fraction(numerator) / total
        values = {i: scale * quotas[i] for i in active}
        offenders = tuple(i for i in active if values[i] < floors[i])
        rounds.append(IterationRound(tuple(active), scale, offenders))
        if not offenders:
            break
        fixed.extend(offenders)
        active = [i for i in active if i not in offenders]

    def _trace(final_quota, feasible, diagnostics=None):
        return IterationTrace(
            classification=cls_, rounds=tuple(rounds),
            final_active=tuple(active), fixed_at_floor=tuple(fixed),
            final_quota=final_quota, feasible=feasible,
            diagnostics=diagnostics)

    leftover = cls_.remaining_seats - sum(floors[i] for i in fixed)
    if not active:
        if leftover < 0:
            return _trace(None, False,
                          f"quota and the bounds force {seats - leftover} "
                          f"seats but the house has {seats}")
        if leftover > 0:
            return _trace(None, False,
                          f"{leftover} seat(s) cannot be granted without "
                          "pushing some state above its upper quota")
        composite = [Fraction(bounds[i]) for i in range(len(quotas))]
        for i in fixed:
            composite[i] = Fraction(floors[i])
        return _trace(tuple(composite), True)
    bad_upper = [i for i in active if values[i] > ceils[i]]
    if bad_upper:
        # Unreachable for quota vectors derived from a problem (the scale
        # never exceeds 1 once small states exist); kept as a guard for raw
        # quota inputs.
        return _trace(None, False,
                      f"rescaled quota exceeds upper quota for states {bad_upper}")
    composite = [Fraction(0)] * len(quotas)
    for i in cls_.small + cls_.exact:
        composite[i] = Fraction(bounds[i])
    for i in fixed:
        composite[i] = Fraction(floors[i])
    for i in active:
        composite[i] = values[i]
    return _trace(tuple(composite), True)


def trace_audit(trace: IterationTrace) -> dict:
    """JSON-ready summary of an iteration trace."""
    return {
        "rounds": [
            {
                "active": list(rnd.active),
                "scale": f"{rnd.scale.numerator}/{rnd.scale.denominator}",
                "fixed": list(rnd.fixed),
            }
            for rnd in trace.rounds
        ],
        "final_active": list(trace.final_active),
        "fixed_at_floor": list(trace.fixed_at_floor),
        "feasible": trace.feasible,
        "diagnostics": trace.diagnostics,
    }


def _composite_parts(trace: IterationTrace):
    final = trace.final_quota
    floors = [math.floor(v) for v in final]
    fracs = [v - f for v, f in zip(final, floors)]
    return floors, fracs


def lower_bound_apportion(prob: Problem, bounds: Sequence[int],
                          src: SeededSource) -> Allocation:
    """Randomized apportionment honouring per-state minimums.

    Runs the rescaling iteration, then the randomized rounding scheme on
    the composite quota vector.  The result satisfies quota and the bounds
    with probability one; expected seats equal the composite quota vector.
    """
    quota = compute_quota(prob)
    bounds = validate_lower_bound(bounds, prob.size)
    trace = iterate_lower_bound(quota, bounds, prob.seats)
    if not trace.feasible:
        raise InfeasibleError(
            f"no allocation satisfies quota with the given bounds: {trace.diagnostics}",
            diagnostics=trace.diagnostics, trace=trace)
    floors, fracs = _composite_parts(trace)
    seats, order, u53 = _scheme_draw(floors, fracs, src)
    audit = {
        "permutation": order,
        "u_numerator": u53,
        "u_denominator": U53_DENOMINATOR,
        "trace": trace_audit(trace),
    }
    return Allocation(seats=tuple(seats), method="stochastic-lower-bound",
                      seed=src.seed, audit=audit)


def lower_bound_distribution(prob: Problem, bounds: Sequence[int],
                             *, limit: int = 8) -> AllocationDistribution:
    """Exact law of the bounded scheme (small state counts only)."""
    quota = compute_quota(prob)
    bounds = validate_lower_bound(bounds, prob.size)
    trace = iterate_lower_bound(quota, bounds, prob.seats)
    if not trace.feasible:
        raise InfeasibleError(
            f"no allocation satisfies quota with the given bounds: {trace.diagnostics}",
            diagnostics=trace.diagnostics, trace=trace)
    floors, fracs = _composite_parts(trace)
    law = residual_distribution(fracs, average_orders=True, limit=limit)
    shifted = {
        tuple(f + b for f, b in zip(floors, bits)): p
        for bits, p in law.items()
    }
    return AllocationDistribution(shifted)


def resample_until_quota(adjusted: AdjustedQuota, src: SeededSource,
                         cap: int = 10 ** 5) -> Allocation:
    """Rerun the scheme on offender-bearing values until quota holds.

    Kept as a reference non-solution: conditioning on the accepted outcome
    shifts the expectations away from the values, so the accepted law is
    not fair.  Seats are indexed by ``adjusted.indices``.
    """
    floors = [math.floor(v) for v in adjusted.values]
    fracs = [v - f for v, f in zip(adjusted.values, floors)]
    for attempt in range(1, cap + 1):
        seats, order, u53 = _scheme_draw(floors, fracs, src)
        if all(f <= a <= c for a, f, c in
               zip(seats, adjusted.original_floors,
                   adjusted.original_ceilings)):
            return Allocation(
                seats=tuple(seats), method="resample-until-quota",
                seed=src.seed,
                audit={"rounds": attempt, "indices": list(adjusted.indices)})
    from .errors import ConvergenceError
    raise ConvergenceError(f"no quota-satisfying outcome in {cap} runs")


def resample_conditional_law(adjusted: AdjustedQuota,
                             *, limit: int = 8) -> AllocationDistribution:
    """Exact law of ``resample_until_quota``: the scheme's law on the
    adjusted values, restricted to quota-satisfying outcomes and
    renormalized."""
    floors = [math.floor(v) for v in adjusted.values]
    fracs = [v - f for v, f in zip(adjusted.values, floors)]
    law = residual_distribution(fracs, average_orders=True, limit=limit)
    kept: dict[tuple[int, ...], Fraction] = {}
    total = Fraction(0)
    for bits, p in law.items():
        seats = tuple(f + b for f, b in zip(floors, bits))
        if all(f <= a <= c for a, f, c in
               zip(seats, adjusted.original_floors,
                   adjusted.original_ceilings)):
            kept[seats] = kept.get(seats, Fraction(0)) + p
            total += p
    if not kept:
        raise InfeasibleError("no quota-satisfying outcome has positive probability")
    return AllocationDistribution({k: p / total for k, p in kept.items()})


@dataclass(frozen=True)
class ScaledQuota:
    """Uniformly shrunken fractional quotas for the surplus states."""

    factor: Fraction
    indices: tuple[int, ...]
    values: tuple[Fraction, ...]


def scaled_fractional_quota(quota, cls_: StateClassification) -> ScaledQuota:
    """Shrink surplus states' fractional quotas by one common factor.

    The factor makes floors plus scaled fractions sum to the remaining
    seats.  Simpler than the rescaling iteration but breaks proportional
    expectations; provided for comparison only.
    """
    quotas = _quota_values(quota)
    fracs = [quotas[i] - math.floor(quotas[i]) for i in cls_.surplus]
    floor_total = sum(math.floor(quotas[i]) for i in cls_.surplus)
    numerator = cls_.remaining_seats - floor_total
    frac_total = sum(fracs, Fraction(0))
    if frac_total == 0:
        if numerator == 0:
            return ScaledQuota(Fraction(0), cls_.surplus,
                               tuple(Fraction(0) for _ in cls_.surplus))
        raise InputError("no fractional quota available to scale")
    factor = Fraction(numerator) / frac_total
    values = tuple(factor * f for f in fracs)
    bad = [i for i, v in zip(cls_.surplus, values) if not 0 <= v < 1]
    if bad:
        raise InputError(
            f"scaled fractional quota leaves [0, 1) for states {bad}")
    return ScaledQuota(factor=factor, indices=cls_.surplus, values=values)
