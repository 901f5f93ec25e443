import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seatlot import (CapacityError, InputError, SeededSource, compute_quota,
                     problem, satisfies_quota)
from seatlot.rng import U53_DENOMINATOR
from seatlot.stochastic import (AllocationDistribution, SystematicDraw,
                                conditional_sampling_allocate,
                                conditional_selection_law, exact_distribution,
                                random_permutation, residual_distribution,
                                stochastic_apportion, systematic_round)

from fixtures import CONDITIONAL_UNFAIR
from oracles import (fixed_order_distribution, full_permutation_distribution,
                     indicators_at)


# --- systematic rounding -------------------------------------------------

def test_round_hand_examples():
    assert systematic_round([F(1, 2), F(1, 2)], F(1, 4)) == [0, 1]
    assert systematic_round([F(1, 2), F(1, 2)], F(3, 5)) == [1, 0]
    assert systematic_round([F(0), F(0), F(0)], F(1, 3)) == [0, 0, 0]


def test_round_rejects_bad_input():
    with pytest.raises(InputError):
        systematic_round([F(1, 2)], F(0))       # total not an integer
    with pytest.raises(InputError):
        systematic_round([F(3, 2), F(1, 2)], F(0))  # entry outside [0, 1)
    with pytest.raises(InputError):
        systematic_round([F(1, 2), F(1, 2)], F(3, 2))  # offset outside [0, 1)


@st.composite
def fractional_vectors(draw, max_states=8, max_den=40):
    s = draw(st.integers(min_value=1, max_value=max_states))
    den = draw(st.integers(min_value=1, max_value=max_den))
    nums = [draw(st.integers(min_value=0, max_value=den - 1))
            for _ in range(s - 1)]
    nums.append((-sum(nums)) % den)
    return [F(n, den) for n in nums]


@given(fractional_vectors(), st.data())
@settings(max_examples=200, deadline=None)
def test_round_sums_to_residual_and_matches_definition(fracs, data):
    u_den = data.draw(st.integers(min_value=1, max_value=997))
    u = F(data.draw(st.integers(min_value=0, max_value=u_den - 1)), u_den)
    out = systematic_round(fracs, u)
    assert sum(out) == sum(fracs)
    assert tuple(out) == indicators_at(u, fracs)


@given(fractional_vectors(), st.integers(min_value=0,
                                         max_value=U53_DENOMINATOR - 1))
@settings(max_examples=200, deadline=None)
def test_grid_fast_path_equals_exact_offset(fracs, u53):
    # The sampling path maps a dyadic offset onto the common-denominator
    # grid; the result must equal rounding at the exact rational offset.
    from seatlot import _backend
    from seatlot.stochastic import _common_numerators

    nums, den = _common_numerators(fracs)
    pos = _backend.position_from_bits53(u53, den)
    fast = _backend.systematic_round_ints(nums, den, pos)
    exact = systematic_round(fracs, F(u53, U53_DENOMINATOR))
    assert fast == exact


def test_systematic_draw_invariants():
    draw = SystematicDraw.from_fractional(F(1, 4), [F(1, 2), F(1, 2)])
    assert draw.cumulative == (F(1, 4), F(3, 4), F(5, 4))
    assert draw.indicators() == [0, 1]
    with pytest.raises(InputError):
        SystematicDraw(u=F(3, 2), cumulative=(F(3, 2),))


# --- permutations ---------------------------------------------------------

def test_permutation_basics():
    assert random_permutation(1, SeededSource(5)) == (0,)
    p1 = random_permutation(6, SeededSource(5))
    p2 = random_permutation(6, SeededSource(5))
    assert p1 == p2
    assert sorted(p1) == list(range(6))
    with pytest.raises(InputError):
        random_permutation(0, SeededSource(5))


# --- full scheme ----------------------------------------------------------

def test_apportion_replayable_from_audit():
    prob = problem((13, 8, 21, 3, 55), 17)
    alloc = stochastic_apportion(prob, SeededSource(404))
    quota = compute_quota(prob)
    order = alloc.audit["permutation"]
    u = F(alloc.audit["u_numerator"], alloc.audit["u_denominator"])
    inds = systematic_round([quota.fractional[i] for i in order], u)
    replay = list(quota.floors)
    for k, i in enumerate(order):
        replay[i] += inds[k]
    assert tuple(replay) == alloc.seats


def test_apportion_always_satisfies_quota():
    src = SeededSource(8)
    for _ in range(300):
        s = 1 + src.randbelow(12)
        pops = [1 + src.randbelow(500) for _ in range(s)]
        seats = src.randbelow(60)
        prob = problem(pops, seats)
        alloc = stochastic_apportion(prob, src.child(src.randbelow(1000)))
        quota = compute_quota(prob)
        assert sum(alloc.seats) == seats
        assert satisfies_quota(alloc, quota)


def test_apportion_integral_quotas_deterministic():
    prob = problem((5, 3, 2), 10)
    for seed in range(25):
        assert stochastic_apportion(prob, SeededSource(seed)).seats == (5, 3, 2)


def test_apportion_small_support():
    prob = problem((1, 1, 7), 3)
    seen = set()
    for seed in range(200):
        seen.add(stochastic_apportion(prob, SeededSource(seed)).seats)
    assert seen <= {(1, 0, 2), (0, 1, 2), (0, 0, 3)}
    assert len(seen) == 3


# --- exact law ------------------------------------------------------------

def test_exact_distribution_examples():
    law = exact_distribution(problem((1, 1, 7), 3))
    assert law.probability((0, 0, 3)) == F(1, 3)
    assert law.marginal_mean(2) == F(7, 3)
    law2 = exact_distribution(problem((2, 3), 7))
    assert law2.probability((3, 4)) == F(4, 5)
    assert law2.probability((2, 5)) == F(1, 5)
    law3 = exact_distribution(problem((5, 3, 2), 10))
    assert law3.probabilities == {(5, 3, 2): F(1)}


def test_residual_distribution_half_half():
    law = residual_distribution([F(1, 2), F(1, 2)])
    assert law.probabilities == {(1, 0): F(1, 2), (0, 1): F(1, 2)}


def test_exact_distribution_capacity():
    with pytest.raises(CapacityError):
        exact_distribution(problem((1,) * 9, 3))
    exact_distribution(problem((1,) * 9, 3), limit=9)


def test_distribution_validates():
    with pytest.raises(InputError):
        AllocationDistribution({(1,): F(1, 2)})
    with pytest.raises(InputError):
        AllocationDistribution({(1,): F(1, 2), (0,): F(-1, 2)})


@given(fractional_vectors(max_states=5, max_den=12))
@settings(max_examples=60, deadline=None)
def test_rotation_classes_equal_full_enumeration(fracs):
    # The library enumerates orderings with the last state pinned; the
    # oracle evaluates midpoints of all s! orderings.  Laws must be equal.
    law = residual_distribution(fracs)
    oracle = full_permutation_distribution(fracs)
    assert law.probabilities == oracle


@given(fractional_vectors(max_states=6, max_den=18))
@settings(max_examples=60, deadline=None)
def test_fixed_order_law_matches_oracle_and_is_fair(fracs):
    law = residual_distribution(fracs, average_orders=False)
    assert law.probabilities == fixed_order_distribution(fracs)
    # Fairness needs no shuffle: marginals equal the fractions exactly.
    assert law.marginal_means() == tuple(fracs)


def test_exact_marginals_equal_quota_random_instances():
    src = SeededSource(31337)
    for _ in range(40):
        s = 1 + src.randbelow(6)
        pops = [1 + src.randbelow(100) for _ in range(s)]
        seats = src.randbelow(30)
        prob = problem(pops, seats)
        law = exact_distribution(prob)
        quota = compute_quota(prob)
        assert law.marginal_means() == quota.quotas
        for seats_vec in law.support():
            assert sum(seats_vec) == seats
            assert satisfies_quota(seats_vec, quota)


def test_marginal_law():
    law = exact_distribution(problem((1, 1, 7), 3))
    assert law.marginal_law(2) == {2: F(2, 3), 3: F(1, 3)}


# --- conditional sampling counterexample ----------------------------------

def test_conditional_single_pick_is_plain_categorical():
    fracs = [F(1, 2), F(1, 4), F(1, 4)]
    counts = [0, 0, 0]
    n = 20_000
    master = SeededSource(55)
    for k in range(n):
        out = conditional_sampling_allocate(fracs, 1, master.child(k))
        counts[out.index(1)] += 1
    for i, f in enumerate(fracs):
        sigma = math.sqrt(n * f * (1 - f))
        assert abs(counts[i] - n * f) <= 4 * sigma


def test_conditional_forced_full_selection():
    out = conditional_sampling_allocate([F(1, 2), F(1, 2)], 2, SeededSource(9))
    assert out == [1, 1]


def test_conditional_skips_zero_fraction_states():
    out = conditional_sampling_allocate([F(0), F(1, 2), F(1, 2)], 2,
                                        SeededSource(10))
    assert out == [0, 1, 1]
    with pytest.raises(InputError):
        conditional_sampling_allocate([F(0), F(1, 2), F(1, 2)], 3,
                                      SeededSource(10))


def test_conditional_law_fixture():
    fix = CONDITIONAL_UNFAIR
    law = conditional_selection_law(fix["fractional"], fix["residual"])
    assert law == fix["selection_law"]
    # the drift away from the fractional quotas is macroscopic
    gaps = [abs(a - b) for a, b in zip(law, fix["fractional"])]
    assert max(gaps) > F(1, 1000)


def test_conditional_retry_cap_raises():
    from seatlot.errors import ConvergenceError

    with pytest.raises(ConvergenceError):
        conditional_sampling_allocate([F(1, 2), F(1, 4), F(1, 4)], 2,
                                      SeededSource(3), max_attempts=0)


def test_single_residual_seat_law_is_categorical():
    # With one residual seat the only fair quota-satisfying law is the
    # categorical one: state i wins with probability equal to its fraction.
    src = SeededSource(71)
    for _ in range(30):
        s = 2 + src.randbelow(5)
        den = 2 + src.randbelow(30)
        nums = [src.randbelow(den) for _ in range(s - 1)]
        # pad to a total of exactly one residual seat
        total = sum(nums) % den
        nums.append((den - total) % den)
        if sum(nums) != den:
            continue
        fracs = [F(x, den) for x in nums]
        law = residual_distribution(fracs)
        expected = {}
        for i, f in enumerate(fracs):
            if f:
                key = tuple(1 if j == i else 0 for j in range(s))
                expected[key] = f
        assert law.probabilities == expected


def test_conditional_law_matches_product_enumeration():
    import itertools

    fracs = [F(3, 10), F(9, 10), F(4, 5)]
    residual = 2
    law = conditional_selection_law(fracs, residual)
    support = range(len(fracs))
    total = F(0)
    per_state = [F(0)] * len(fracs)
    for combo in itertools.product(support, repeat=residual):
        if len(set(combo)) != residual:
            continue
        w = F(1)
        for i in combo:
            w *= fracs[i]
        total += w
        for i in set(combo):
            per_state[i] += w
    assert law == tuple(p / total for p in per_state)
