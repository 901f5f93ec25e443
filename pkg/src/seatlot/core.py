"""Exact-arithmetic domain types and quota predicates.

A *problem* is a list of states with positive integer populations and a
non-negative house size.  Each state's quota is its exactly proportional
share of the house, kept as a rational number throughout: quota ties and
integrality (a fractional part of exactly zero) are decided exactly, never
through floating point.  Floats appear only in rendered reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .errors import InputError

Rational = Fraction


def as_fractions(values: Sequence) -> tuple[Fraction, ...]:
    """Coerce a sequence of ints/Fractions/strings to exact Fractions."""
    try:
        return tuple(Fraction(v) for v in values)
    except (TypeError, ValueError) as exc:
        raise InputError(f"not an exact rational vector: {values!r}") from exc


@dataclass(frozen=True)
class Problem:
    """A set of labelled states with populations, and a house size."""

    labels: tuple[str, ...]
    populations: tuple[int, ...]
    seats: int

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))
        object.__setattr__(self, "populations", tuple(self.populations))
        if len(self.labels) != len(self.populations):
            raise InputError("labels and populations differ in length")
        if not self.labels:
            raise InputError("a problem needs at least one state")
        if len(set(self.labels)) != len(self.labels):
            raise InputError("state labels must be pairwise distinct")
        for p in self.populations:
            if not isinstance(p, int) or isinstance(p, bool) or p < 1:
                raise InputError(f"populations must be positive integers, got {p!r}")
        if not isinstance(self.seats, int) or self.seats < 0:
            raise InputError(f"seats must be a non-negative integer, got {self.seats!r}")

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def total_population(self) -> int:
        return sum(self.populations)


def problem(populations: Sequence[int], seats: int,
            labels: Optional[Sequence[str]] = None) -> Problem:
    """Convenience constructor with auto-generated labels S1..Sn."""
    if labels is None:
        labels = tuple(f"S{i + 1}" for i in range(len(populations)))
    return Problem(tuple(labels), tuple(populations), seats)


@dataclass(frozen=True)
class QuotaVector:
    """Exact quotas with their derived integer structure.

    ``quotas[i]`` is the exact entitlement of state i; ``floors`` and
    ``fractional`` split it into whole seats and the residual entitlement.
    ``residual_seats`` is the number of seats left after every floor is
    granted, and ``unsatisfied_count`` the number of states still competing
    for them.
    """

    quotas: tuple[Fraction, ...]
    floors: tuple[int, ...]
    fractional: tuple[Fraction, ...]
    residual_seats: int
    unsatisfied_count: int

    @property
    def size(self) -> int:
        return len(self.quotas)

    @property
    def ceilings(self) -> tuple[int, ...]:
        return tuple(f + (1 if q else 0)
                     for f, q in zip(self.floors, self.fractional))


def quota_vector(values: Sequence) -> QuotaVector:
    """Build a QuotaVector from raw rational entitlements.

    Unlike :func:`compute_quota` this does not require the values to sum to
    an integer house size, which allows checks on externally supplied quota
    tables; ``residual_seats`` is -1 when the fractional parts do not total
    an integer.
    """
    quotas = as_fractions(values)
    for q in quotas:
        if q < 0:
            raise InputError(f"quota values must be non-negative, got {q}")
    floors = tuple(math.floor(q) for q in quotas)
    fractional = tuple(q - f for q, f in zip(quotas, floors))
    total_frac = sum(fractional, Fraction(0))
    residual = int(total_frac) if total_frac.denominator == 1 else -1
    return QuotaVector(
        quotas=quotas,
        floors=floors,
        fractional=fractional,
        residual_seats=residual,
        unsatisfied_count=sum(1 for f in fractional if f > 0),
    )


def compute_quota(prob: Problem) -> QuotaVector:
    """Exact quotas seats * population / total for every state."""
    total = prob.total_population
    quotas = tuple(Fraction(prob.seats * p, total) for p in prob.populations)
    qv = quota_vector(quotas)
    assert sum(qv.quotas, Fraction(0)) == prob.seats
    return qv


@dataclass(frozen=True)
class Allocation:
    """An integer seat vector with provenance for replay."""

    seats: tuple[int, ...]
    method: str
    seed: Optional[int] = None
    audit: Optional[Mapping] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "seats", tuple(self.seats))
        for a in self.seats:
            if not isinstance(a, int) or a < 0:
                raise InputError(f"seat counts must be non-negative integers, got {a!r}")

    @property
    def total(self) -> int:
        return sum(self.seats)


def seat_values(alloc) -> tuple[int, ...]:
    """Accept an Allocation or a plain seat sequence."""
    seats = getattr(alloc, "seats", alloc)
    return tuple(seats)


def satisfies_quota(alloc, quota: QuotaVector) -> bool:
    """True when every state sits between its lower and upper quota."""
    seats = seat_values(alloc)
    if len(seats) != quota.size:
        raise InputError("allocation and quota vector differ in length")
    return all(f <= a <= c
               for a, f, c in zip(seats, quota.floors, quota.ceilings))


def validate_lower_bound(bounds: Sequence[int], size: int) -> tuple[int, ...]:
    bounds = tuple(bounds)
    if len(bounds) != size:
        raise InputError("lower-bound vector and state list differ in length")
    for b in bounds:
        if not isinstance(b, int) or b < 0:
            raise InputError(f"lower bounds must be non-negative integers, got {b!r}")
    return bounds


def broadcast_lower_bound(bound, size: int) -> tuple[int, ...]:
    """Expand a scalar bound to all states; pass sequences through."""
    if isinstance(bound, int):
        return validate_lower_bound((bound,) * size, size)
    return validate_lower_bound(bound, size)


def feasible_with_lower_bound(quota: QuotaVector, bounds: Sequence[int],
                              seats: int) -> bool:
    """Existence test for an allocation satisfying quota with lower bound.

    Such an allocation exists exactly when no bound exceeds its state's
    upper quota and the floors forced by max(bound, lower quota) still fit
    in the house.
    """
    bounds = validate_lower_bound(bounds, quota.size)
    if any(b > c for b, c in zip(bounds, quota.ceilings)):
        return False
    return sum(max(b, f) for b, f in zip(bounds, quota.floors)) <= seats
