"""Randomized apportionment with exact marginals, plus its exact law.

The scheme: shuffle the states, grant every state the floor of its quota,
then lay the fractional quotas end to end on a line offset by one uniform
draw and award a residual seat to each state whose segment contains an
integer.  Every outcome satisfies quota, and each state's expected seats
equal its quota exactly.

``exact_distribution`` is the verification oracle: it computes the full
law of the scheme by enumerating state orderings and, for each ordering,
partitioning the offset space into the finitely many cells on which the
allocation is constant.  Cyclic rotations of an ordering induce the same
law (shifting the offset absorbs the rotation), so only orderings with the
last state pinned are enumerated; equality with the all-orderings average
is covered by tests.

``conditional_sampling_allocate`` implements a tempting but biased
alternative - draw residual-seat winners independently with probability
proportional to fractional quota, conditioned on all winners being distinct
- kept here as a counterexample; its selection probabilities provably drift
from the fractional quotas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Sequence, Tuple

from . import _backend
from .core import Allocation, Problem, as_fractions, compute_quota
from .errors import CapacityError, ConvergenceError, InputError
from .rng import SeededSource, U53_DENOMINATOR

ENUMERATION_LIMIT = 8


def random_permutation(n: int, src: SeededSource) -> tuple[int, ...]:
    """Uniform permutation of range(n), deterministic given the source."""
    if n < 1:
        raise InputError("permutation length must be at least 1")
    return tuple(src.shuffled_range(n))


def _common_numerators(fracs: Sequence[Fraction]) -> tuple[list[int], int]:
    den = math.lcm(*(f.denominator for f in fracs)) if fracs else 1
    return [int(f * den) for f in fracs], den


def _check_fractional(fracs: Sequence[Fraction]) -> None:
    for f in fracs:
        if not 0 <= f < 1:
            raise InputError(f"fractional quotas must lie in [0, 1), got {f}")
    total = sum(fracs, Fraction(0))
    if total.denominator != 1:
        raise InputError(f"fractional quotas must sum to an integer, got {total}")


@dataclass(frozen=True)
class SystematicDraw:
    """A uniform offset together with the cumulative entitlement grid."""

    u: Fraction
    cumulative: tuple[Fraction, ...]

    def __post_init__(self):
        if not 0 <= self.u < 1:
            raise InputError(f"offset must lie in [0, 1), got {self.u}")
        if not self.cumulative or self.cumulative[0] != self.u:
            raise InputError("cumulative grid must start at the offset")
        for a, b in zip(self.cumulative, self.cumulative[1:]):
            if b < a:
                raise InputError("cumulative grid must be non-decreasing")

    @classmethod
    def from_fractional(cls, u: Fraction,
                        fracs: Sequence[Fraction]) -> "SystematicDraw":
        fracs = as_fractions(fracs)
        grid = [Fraction(u)]
        for f in fracs:
            grid.append(grid[-1] + f)
        return cls(u=Fraction(u), cumulative=tuple(grid))

    def indicators(self) -> list[int]:
        """Residual-seat indicator per segment of the grid."""
        out = []
        for a, b in zip(self.cumulative, self.cumulative[1:]):
            out.append(1 if math.ceil(a) < b else 0)
        return out


def systematic_round(fracs: Sequence, u) -> list[int]:
    """Award residual seats by systematic rounding at exact offset ``u``.

    Returns the 0/1 vector whose i-th entry says whether the half-open
    interval of cumulative fractional quota ending at state i contains an
    integer.  The entries always sum to the (integer) total of ``fracs``.
    """
    fracs = as_fractions(fracs)
    u = Fraction(u)
    if not 0 <= u < 1:
        raise InputError(f"offset must lie in [0, 1), got {u}")
    _check_fractional(fracs)
    den = math.lcm(u.denominator,
                   *(f.denominator for f in fracs)) if fracs else 1
    nums = [int(f * den) for f in fracs]
    return _backend.systematic_round_ints(nums, den, int(u * den))


def stochastic_apportion(prob: Problem, src: SeededSource) -> Allocation:
    """One draw of the fair randomized scheme.

    The returned allocation always satisfies quota.  The audit record holds
    the state ordering used and the uniform offset (as a dyadic rational),
    which replay the draw exactly.
    """
    quota = compute_quota(prob)
    seats, order, u53 = _scheme_draw(quota.floors, quota.fractional, src)
    return Allocation(
        seats=tuple(seats),
        method="stochastic",
        seed=src.seed,
        audit={
            "permutation": order,
            "u_numerator": u53,
            "u_denominator": U53_DENOMINATOR,
        },
    )


def _scheme_draw(floors: Sequence[int], fracs: Sequence[Fraction],
                 src: SeededSource) -> tuple[list[int], tuple[int, ...], int]:
    """Shuffle, draw, round; returns (seats, ordering, offset numerator)."""
    s = len(floors)
    order = random_permutation(s, src)
    u53 = src.bits53()
    nums, den = _common_numerators(list(fracs))
    pos = _backend.position_from_bits53(u53, den)
    ordered = [nums[i] for i in order]
    inds = _backend.systematic_round_ints(ordered, den, pos)
    seats = list(floors)
    for k, i in enumerate(order):
        seats[i] += inds[k]
    return seats, order, u53


class AllocationDistribution:
    """Exact law of an allocation: support vectors with rational masses."""

    def __init__(self, probabilities: Mapping[Tuple[int, ...], Fraction]):
        items = sorted(probabilities.items())
        total = Fraction(0)
        for seats, p in items:
            if p <= 0:
                raise InputError(f"probabilities must be positive, got {p} for {seats}")
            total += p
        if items and total != 1:
            raise InputError(f"probabilities must sum to 1, got {total}")
        self.probabilities: Dict[Tuple[int, ...], Fraction] = dict(items)

    def __len__(self):
        return len(self.probabilities)

    def __eq__(self, other):
        return (isinstance(other, AllocationDistribution)
                and self.probabilities == other.probabilities)

    def support(self) -> list[tuple[int, ...]]:
        return list(self.probabilities)

    def items(self) -> Iterable[tuple[tuple[int, ...], Fraction]]:
        return self.probabilities.items()

    def probability(self, seats: Sequence[int]) -> Fraction:
        return self.probabilities.get(tuple(seats), Fraction(0))

    def marginal_mean(self, i: int) -> Fraction:
        return sum((p * seats[i] for seats, p in self.probabilities.items()),
                   Fraction(0))

    def marginal_means(self) -> tuple[Fraction, ...]:
        size = len(next(iter(self.probabilities)))
        return tuple(self.marginal_mean(i) for i in range(size))

    def marginal_law(self, i: int) -> dict[int, Fraction]:
        law: dict[int, Fraction] = {}
        for seats, p in self.probabilities.items():
            law[seats[i]] = law.get(seats[i], Fraction(0)) + p
        return dict(sorted(law.items()))


def _indicator_law(fracs: Sequence[Fraction],
                   average_orders: bool) -> dict[tuple[int, ...], Fraction]:
    nums, den = _common_numerators(list(fracs))
    s = len(fracs)
    if average_orders:
        lengths = _backend.averaged_mask_lengths(nums, den, True)
        orders = math.factorial(s - 1) if s > 1 else 1
        total = den * orders
        law: dict[tuple[int, ...], Fraction] = {}
        for mask, length in enumerate(lengths):
            if length:
                key = tuple((mask >> i) & 1 for i in range(s))
                law[key] = Fraction(length, total)
        return law
    law = {}
    for mask, length in _backend.fixed_order_cells(nums, den):
        key = tuple((mask >> i) & 1 for i in range(s))
        law[key] = law.get(key, Fraction(0)) + Fraction(length, den)
    return law


def residual_distribution(fracs: Sequence, *, average_orders: bool = True,
                          limit: int = ENUMERATION_LIMIT) -> AllocationDistribution:
    """Exact law of the residual-seat indicator vector.

    With ``average_orders`` the law is averaged over all state orderings
    (the full scheme); otherwise the states are processed in the given
    fixed order, skipping the shuffle step.
    """
    fracs = as_fractions(fracs)
    _check_fractional(fracs)
    if len(fracs) > limit:
        raise CapacityError(
            f"exact enumeration supports at most {limit} states, got {len(fracs)}")
    return AllocationDistribution(_indicator_law(fracs, average_orders))


def exact_distribution(prob: Problem, *,
                       limit: int = ENUMERATION_LIMIT) -> AllocationDistribution:
    """Exact law of the randomized scheme's allocation for a problem.

    Marginal means reproduce the quota vector as a rational identity, and
    every support vector satisfies quota; this is the sampling-free oracle
    against which the scheme is verified.
    """
    if prob.size > limit:
        raise CapacityError(
            f"exact enumeration supports at most {limit} states, got {prob.size}")
    quota = compute_quota(prob)
    law = _indicator_law(list(quota.fractional), True)
    shifted = {
        tuple(f + b for f, b in zip(quota.floors, bits)): p
        for bits, p in law.items()
    }
    return AllocationDistribution(shifted)


def conditional_sampling_allocate(fracs: Sequence, residual: int,
                                  src: SeededSource,
                                  max_attempts: int = 10 ** 6) -> list[int]:
    """Residual seats via distinct-conditioned categorical sampling.

    Draws ``residual`` indices independently with probability proportional
    to fractional quota (restricted to states with positive fraction) and
    resamples the whole tuple whenever two indices collide.  This realizes
    the law conditioned on distinctness - which is *not* marginally fair;
    see ``conditional_selection_law``.
    """
    fracs = as_fractions(fracs)
    support = [i for i, f in enumerate(fracs) if f > 0]
    if residual < 0 or residual > len(support):
        raise InputError(
            f"cannot pick {residual} distinct states from {len(support)} with positive fraction")
    out = [0] * len(fracs)
    if residual == 0:
        return out
    nums, _den = _common_numerators([fracs[i] for i in support])
    total = sum(nums)
    chosen = [0] * residual
    for _attempt in range(max_attempts):
        for t in range(residual):
            v = src.randbelow(total)
            acc = 0
            idx = len(support) - 1
            for i, w in enumerate(nums):
                acc += w
                if v < acc:
                    idx = i
                    break
            chosen[t] = idx
        if len(set(chosen)) == residual:
            for idx in chosen:
                out[support[idx]] = 1
            return out
    raise ConvergenceError(
        f"no collision-free tuple found in {max_attempts} attempts")


def conditional_selection_law(fracs: Sequence, residual: int,
                              max_tuples: int = 10 ** 6) -> tuple[Fraction, ...]:
    """Exact per-state selection probability of the conditioned sampler.

    Enumerates every ordered tuple of distinct indices, weighting by the
    product of categorical probabilities, and normalizes.  Small inputs
    only; guarded by ``max_tuples``.
    """
    import itertools

    fracs = as_fractions(fracs)
    support = [i for i, f in enumerate(fracs) if f > 0]
    if residual < 0 or residual > len(support):
        raise InputError(
            f"cannot pick {residual} distinct states from {len(support)} with positive fraction")
    if residual == 0:
        return tuple(Fraction(0) for _ in fracs)
    if math.perm(len(support), residual) > max_tuples:
        raise CapacityError("too many ordered tuples to enumerate exactly")
    weight_total = Fraction(0)
    per_state = [Fraction(0)] * len(fracs)
    for combo in itertools.permutations(support, residual):
        w = Fraction(1)
        for i in combo:
            w *= fracs[i]
        weight_total += w
        for i in combo:
            per_state[i] += w
    if weight_total == 0:
        raise InputError("all selection weights vanish")
    return tuple(p / weight_total for p in per_state)
