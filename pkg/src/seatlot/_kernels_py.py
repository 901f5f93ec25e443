"""Pure-Python kernels for the hot inner loops.

The compiled module ``seatlot._kernels_c`` implements the same functions
with int64/int128 arithmetic; this module is the reference implementation
and the fallback for interpreters without the extension or for inputs whose
integer magnitudes exceed the compiled ranges.  Both backends must produce
bit-identical results; ``tests/test_kernels.py`` enforces that.

Conventions shared by both backends:

* Fractional seat entitlements arrive as integer numerators ``frac_nums``
  over a common denominator ``den``; each numerator lies in [0, den) and
  their total is a multiple of ``den``.
* A rounding position ``u_num`` is a numerator over the same ``den``
  (0 <= u_num <= den).  State ``k`` of the given order wins a residual seat
  exactly when the half-open interval [u + c(k-1), u + c(k)) of cumulative
  entitlements contains an integer, i.e. when ceil((u_num + c(k)) / den)
  exceeds ceil((u_num + c(k-1)) / den).
* Indicator vectors are packed as bit masks (bit i = state i wins a seat).
* All randomness is SplitMix64 per :mod:`seatlot.rng`; replicate ``k`` of a
  batch uses the stream seeded by ``child_seed(master_seed, k)``.
"""

from __future__ import annotations

import itertools

from .rng import SeededSource, child_seed

_M53 = 1 << 53


def systematic_round_ints(frac_nums, den, u_num):
    """0/1 residual-seat indicators for one ordering, exact integer test."""
    out = []
    prev_ceil = (u_num + den - 1) // den
    c = u_num
    for f in frac_nums:
        c += f
        cur_ceil = (c + den - 1) // den
        out.append(cur_ceil - prev_ceil)
        prev_ceil = cur_ceil
    return out


def position_from_bits53(u53, den):
    """Map a uniform draw k/2**53 to the rounding position on the den-grid.

    Indicator vectors, as functions of the continuous offset u, are constant
    on the half-open grid cells (c/den, (c+1)/den]; ceil(k*den / 2**53) is the
    representative of the cell containing k/2**53, so rounding at the mapped
    position equals rounding at the exact rational k/2**53.
    """
    return (u53 * den + _M53 - 1) >> 53


def fixed_order_cells(frac_nums, den):
    """Partition of offsets [0, 1) into cells of constant allocation.

    Returns ``[(mask, length)]``: for each cell, the winner mask (bit k =
    position k of the given order) and the integer cell length over ``den``.
    Lengths sum to ``den``; cell j is the offset interval (b_j, b_{j+1}]
    between consecutive breakpoints, evaluated at its right endpoint.
    """
    cums = []
    c = 0
    for f in frac_nums:
        c += f
        cums.append(c)
    bps = sorted({(-c) % den for c in cums})
    cells = []
    if not bps:
        return [(0, den)]
    nb = len(bps)
    for j in range(nb):
        left = bps[j]
        right = bps[j + 1] if j + 1 < nb else den
        inds = systematic_round_ints(frac_nums, den, right)
        mask = 0
        for k, bit in enumerate(inds):
            if bit:
                mask |= 1 << k
        cells.append((mask, right - left))
    return cells


def averaged_mask_lengths(frac_nums, den, fix_last):
    """Total cell length per winner mask, summed over state orderings.

    With ``fix_last`` the last state stays in the final slot and only the
    (s-1)! orderings of the remaining states are enumerated; cyclic rotations
    of an ordering induce the same allocation law, so these representatives
    average to the same distribution as all s! orderings.  Masks are in the
    input-index basis.  Divide by ``den * (number of orderings)`` to get
    probabilities.
    """
    s = len(frac_nums)
    if s == 0:
        return [den]
    acc = [0] * (1 << s)
    if fix_last and s > 1:
        head, tail = list(range(s - 1)), [s - 1]
    else:
        head, tail = list(range(s)), []
    for perm in itertools.permutations(head):
        order = list(perm) + tail
        cums = []
        c = 0
        for i in order:
            c += frac_nums[i]
            cums.append(c)
        bps = sorted({(-c) % den for c in cums})
        nb = len(bps)
        for j in range(nb):
            left = bps[j]
            right = bps[j + 1] if j + 1 < nb else den
            mask = 0
            prev_ceil = (right + den - 1) // den
            c = right
            for k in order:
                c += frac_nums[k]
                cur_ceil = (c + den - 1) // den
                if cur_ceil != prev_ceil:
                    mask |= 1 << k
                prev_ceil = cur_ceil
            acc[mask] += right - left
    return acc


def _permuted_indicators(src, frac_nums, den, s, seats_out, scheme_floors):
    """One scheme replicate: shuffle, draw, round; fills seats_out."""
    order = src.shuffled_range(s)
    u53 = src.bits53()
    u = position_from_bits53(u53, den)
    prev_ceil = (u + den - 1) // den
    c = u
    for k in range(s):
        i = order[k]
        c += frac_nums[i]
        cur_ceil = (c + den - 1) // den
        seats_out[i] = scheme_floors[i] + (cur_ceil - prev_ceil)
        prev_ceil = cur_ceil


def simulate_batch(scheme_floors, frac_nums, den, quota_floors, quota_ceils,
                   lower_bounds, master_seed, n, house_size):
    """n seeded scheme replicates with per-replicate violation checks.

    Returns ``(seat_sums, seat_sumsqs, quota_violations, bound_violations,
    sum_mismatches, mask_counts)``: violation counts are per replicate,
    sum_mismatches counts replicates whose seats do not total house_size,
    and mask_counts (input-index winner masks, only for s <= 16, else None)
    recover the empirical allocation distribution.
    """
    s = len(frac_nums)
    sums = [0] * s
    sumsqs = [0] * s
    quota_violations = 0
    bound_violations = 0
    sum_mismatches = 0
    mask_counts = [0] * (1 << s) if s <= 16 else None
    seats = [0] * s
    for k in range(n):
        src = SeededSource(child_seed(master_seed, k))
        _permuted_indicators(src, frac_nums, den, s, seats, scheme_floors)
        bad_quota = False
        bad_bound = False
        mask = 0
        total = 0
        for i in range(s):
            a = seats[i]
            total += a
            sums[i] += a
            sumsqs[i] += a * a
            if a < quota_floors[i] or a > quota_ceils[i]:
                bad_quota = True
            if a < lower_bounds[i]:
                bad_bound = True
            if mask_counts is not None and a > scheme_floors[i]:
                mask |= 1 << i
        if bad_quota:
            quota_violations += 1
        if bad_bound:
            bound_violations += 1
        if total != house_size:
            sum_mismatches += 1
        if mask_counts is not None:
            mask_counts[mask] += 1
    return (sums, sumsqs, quota_violations, bound_violations,
            sum_mismatches, mask_counts)


def conditional_batch(weight_nums, r_sel, master_seed, n, cap):
    """n replicates of rejection-sampled distinct-index selection.

    Each replicate draws r_sel categorical indices (weight proportional to
    weight_nums) and resamples the whole tuple on any collision, up to
    ``cap`` attempts.  Returns (per-index selection counts, failed replicate
    count).
    """
    s = len(weight_nums)
    total = sum(weight_nums)
    counts = [0] * s
    failures = 0
    chosen = [0] * r_sel
    for k in range(n):
        src = SeededSource(child_seed(master_seed, k))
        ok = False
        for _attempt in range(cap):
            # Draw the whole tuple before the collision check so that every
            # attempt consumes exactly r_sel draws (stream-replay contract).
            for t in range(r_sel):
                v = src.randbelow(total)
                acc = 0
                idx = s - 1
                for i in range(s):
                    acc += weight_nums[i]
                    if v < acc:
                        idx = i
                        break
                chosen[t] = idx
            distinct = True
            for a in range(r_sel):
                for b in range(a + 1, r_sel):
                    if chosen[a] == chosen[b]:
                        distinct = False
                        break
                if not distinct:
                    break
            if distinct:
                ok = True
                break
        if ok:
            for t in range(r_sel):
                counts[chosen[t]] += 1
        else:
            failures += 1
    return counts, failures


def resample_batch(scheme_floors, frac_nums, den, target_floors, target_ceils,
                   master_seed, n, cap):
    """n replicates of run-until-within-target rounding.

    Each replicate reruns the scheme (fresh shuffle and draw from its own
    stream) until every state's seats fall within [target_floors,
    target_ceils], up to ``cap`` rounds.  Returns (seat_sums, seat_sumsqs,
    total accepted-round count, failed replicate count).
    """
    s = len(frac_nums)
    sums = [0] * s
    sumsqs = [0] * s
    rounds_total = 0
    failures = 0
    seats = [0] * s
    for k in range(n):
        src = SeededSource(child_seed(master_seed, k))
        ok = False
        for attempt in range(1, cap + 1):
            _permuted_indicators(src, frac_nums, den, s, seats, scheme_floors)
            good = True
            for i in range(s):
                if seats[i] < target_floors[i] or seats[i] > target_ceils[i]:
                    good = False
                    break
            if good:
                ok = True
                rounds_total += attempt
                break
        if ok:
            for i in range(s):
                sums[i] += seats[i]
                sumsqs[i] += seats[i] * seats[i]
        else:
            failures += 1
    return sums, sumsqs, rounds_total, failures
