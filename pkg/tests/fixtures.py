"""Pinned fixtures: scan-discovered paradox witnesses and counterexample
instances.  Every witness here was found by the brute-force scans in the
test suite and is re-verified by the tests that use it, so a regression in
the methods cannot hide behind a stale fixture."""

from fractions import Fraction

# Largest-remainders loses a seat when the house grows: populations,
# house size before the extra seat, allocations before/after, losing state.
HAMILTON_ALABAMA = {
    "populations": (1, 3, 3),
    "house_before": 3,
    "seats_before": (1, 1, 1),
    "seats_after": (0, 2, 2),
    "loser": 0,
}

# Largest-remainders: every state grows, the fastest-growing of the pair
# loses a seat to the slower.  Found by seeded random search.
HAMILTON_POPULATION = {
    "populations_before": (26, 40, 21, 11),
    "populations_after": (38, 44, 28, 12),
    "seats": 14,
    "loser": 1,          # growth 44/40 = 11/10
    "gainer": 3,         # growth 12/11 < 11/10
}

# Largest-remainders: a new state joins with its fair share of extra seats,
# and two original states' allocations change.
HAMILTON_NEW_STATE = {
    "base_populations": (26, 24, 29, 17, 9),
    "base_seats": 6,
    "new_population": 29,
    "extra_seats": 2,
    "changed_states": (0, 4),
}

# Greatest-divisors awards a state more than its upper quota.
JEFFERSON_UPPER_QUOTA = {
    "populations": (2, 1, 1),
    "seats": 2,
    "allocation": (2, 0, 0),
    "violator": 0,
}

# Conditioned distinct-index sampling: selection probabilities drift from
# the fractional quotas (exact law computed by tuple enumeration).
CONDITIONAL_UNFAIR = {
    "fractional": (Fraction(9, 10), Fraction(9, 10), Fraction(1, 5)),
    "residual": 2,
    "selection_law": (Fraction(11, 13), Fraction(11, 13), Fraction(4, 13)),
}

# Rerun-until-quota on offender-bearing values: the accepted law is the
# point mass (3, 2), so conditional means differ from the values by 1/5.
RESAMPLE_UNFAIR = {
    "values": (Fraction(14, 5), Fraction(11, 5)),
    "original_floors": (3, 2),
    "original_ceilings": (4, 3),
    "conditional_means": (Fraction(3), Fraction(2)),
    "acceptance_probability": Fraction(4, 5),
}

# Published 1950/2000 offender rows: original quota, rescaled quota, and the
# gap below the lower quota.
TABLE_OFFENDER_PAIRS = [
    ("NewYork", Fraction("43.038"), Fraction("42.962"), Fraction("0.038")),
    ("Pennsylvania", Fraction("19.013"), Fraction("18.999"), Fraction("0.001")),
]
