# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: int64/int128 twins of ``seatlot._kernels_py``.

Same function signatures, same semantics, bit-identical outputs (enforced
by tests/test_kernels.py).  Callers are responsible for keeping integer
magnitudes inside 64-bit range; ``seatlot._backend`` checks that before
dispatching here.
"""

from libc.stdint cimport int64_t, uint64_t
from libc.stdlib cimport free, malloc

cdef extern from *:
    ctypedef long long int128 "__int128"

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15u
cdef uint64_t M53_MASK = (1u << 53) - 1


cdef inline uint64_t _mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9u
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBu
    return z ^ (z >> 31)


cdef inline uint64_t _next64(uint64_t *state) noexcept nogil:
    state[0] = state[0] + GOLDEN
    return _mix64(state[0])


cdef inline uint64_t _child_seed(uint64_t master, uint64_t index) noexcept nogil:
    return _mix64(master + (index + 1) * GOLDEN)


cdef inline uint64_t _randbelow(uint64_t *state, uint64_t n) noexcept nogil:
    # Rejection sampling; mirrors SeededSource.randbelow exactly, including
    # consuming no draw for n == 1.
    cdef uint64_t mod, limit, draw
    if n == 1:
        return 0
    mod = ((<uint64_t>0xFFFFFFFFFFFFFFFFu) % n + 1) % n
    if mod == 0:
        return _next64(state) % n
    limit = (<uint64_t>0) - mod
    while True:
        draw = _next64(state)
        if draw < limit:
            return draw % n


cdef int64_t* _to_i64(list values) except NULL:
    cdef Py_ssize_t n = len(values)
    cdef int64_t *out = <int64_t*>malloc(n * sizeof(int64_t) if n else sizeof(int64_t))
    if out == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    for i in range(n):
        out[i] = values[i]
    return out


def systematic_round_ints(list frac_nums, den, u_num):
    cdef Py_ssize_t s = len(frac_nums)
    cdef int64_t cden = den
    cdef int64_t c = u_num
    cdef int64_t prev_ceil = (c + cden - 1) // cden
    cdef int64_t cur_ceil
    cdef Py_ssize_t i
    cdef int64_t *fr = _to_i64(frac_nums)
    out = [0] * s
    try:
        for i in range(s):
            c += fr[i]
            cur_ceil = (c + cden - 1) // cden
            out[i] = cur_ceil - prev_ceil
            prev_ceil = cur_ceil
    finally:
        free(fr)
    return out


cdef void _sort_i64(int64_t *xs, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef int64_t key
    for i in range(1, n):
        key = xs[i]
        j = i - 1
        while j >= 0 and xs[j] > key:
            xs[j + 1] = xs[j]
            j -= 1
        xs[j + 1] = key


def fixed_order_cells(list frac_nums, den):
    cdef Py_ssize_t s = len(frac_nums)
    cdef int64_t cden = den
    if s == 0:
        return [(0, den)]
    cdef int64_t *fr = _to_i64(frac_nums)
    cdef int64_t *bps = <int64_t*>malloc(s * sizeof(int64_t))
    if bps == NULL:
        free(fr)
        raise MemoryError()
    cdef Py_ssize_t i, j
    cdef int64_t c = 0
    cdef int64_t left, right, prev_ceil, cur_ceil
    cdef uint64_t mask
    cells = []
    try:
        for i in range(s):
            c += fr[i]
            bps[i] = (cden - c % cden) % cden
        _sort_i64(bps, s)
        for j in range(s):
            left = bps[j]
            right = bps[j + 1] if j + 1 < s else cden
            if right == left:
                continue
            mask = 0
            c = right
            prev_ceil = (c + cden - 1) // cden
            for i in range(s):
                c += fr[i]
                cur_ceil = (c + cden - 1) // cden
                if cur_ceil != prev_ceil:
                    mask |= (<uint64_t>1) << i
                prev_ceil = cur_ceil
            cells.append((int(mask), int(right - left)))
    finally:
        free(fr)
        free(bps)
    return cells


def averaged_mask_lengths(list frac_nums, den, fix_last):
    cdef Py_ssize_t s = len(frac_nums)
    if s == 0:
        return [den]
    if s > 16:
        raise ValueError("compiled kernel supports at most 16 states")
    cdef int64_t cden = den
    cdef Py_ssize_t head = s - 1 if (fix_last and s > 1) else s
    cdef int64_t *fr = _to_i64(frac_nums)
    cdef int64_t *acc = <int64_t*>malloc((1 << s) * sizeof(int64_t))
    cdef int64_t *order = <int64_t*>malloc(s * sizeof(int64_t))
    cdef int64_t *counters = <int64_t*>malloc((head + 1) * sizeof(int64_t))
    cdef int64_t *bps = <int64_t*>malloc(s * sizeof(int64_t))
    if acc == NULL or order == NULL or counters == NULL or bps == NULL:
        free(fr); free(acc); free(order); free(counters); free(bps)
        raise MemoryError()
    cdef Py_ssize_t i, k
    cdef int64_t tmp
    for i in range(1 << s):
        acc[i] = 0
    for i in range(s):
        order[i] = i
    for i in range(head + 1):
        counters[i] = 0
    with nogil:
        _accumulate_order(fr, order, bps, acc, s, cden)
        # Heap's algorithm over the first `head` slots.
        i = 0
        while i < head:
            if counters[i] < i:
                if i % 2 == 0:
                    tmp = order[0]; order[0] = order[i]; order[i] = tmp
                else:
                    tmp = order[counters[i]]; order[counters[i]] = order[i]; order[i] = tmp
                _accumulate_order(fr, order, bps, acc, s, cden)
                counters[i] += 1
                i = 0
            else:
                counters[i] = 0
                i += 1
    out = [0] * (1 << s)
    for i in range(1 << s):
        out[i] = acc[i]
    free(fr); free(acc); free(order); free(counters); free(bps)
    return out


cdef void _accumulate_order(int64_t *fr, int64_t *order, int64_t *bps,
                            int64_t *acc, Py_ssize_t s, int64_t den) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef int64_t c = 0
    cdef int64_t left, right, prev_ceil, cur_ceil
    cdef uint64_t mask
    for i in range(s):
        c += fr[order[i]]
        bps[i] = (den - c % den) % den
    _sort_i64(bps, s)
    for j in range(s):
        left = bps[j]
        right = bps[j + 1] if j + 1 < s else den
        if right == left:
            continue
        mask = 0
        c = right
        prev_ceil = (c + den - 1) // den
        for i in range(s):
            c += fr[order[i]]
            cur_ceil = (c + den - 1) // den
            if cur_ceil != prev_ceil:
                mask |= (<uint64_t>1) << order[i]
            prev_ceil = cur_ceil
        acc[mask] += right - left


cdef void _scheme_replicate(uint64_t *state, int64_t *fr, int64_t *floors,
                            int64_t *order, int64_t *seats,
                            Py_ssize_t s, int64_t den) noexcept nogil:
    """Shuffle + draw + round, mirroring stochastic._scheme_draw."""
    cdef Py_ssize_t i, k
    cdef int64_t j, tmp
    cdef uint64_t u53
    cdef int128 prod
    cdef int64_t pos, c, prev_ceil, cur_ceil
    for i in range(s):
        order[i] = i
    for i in range(s - 1, 0, -1):
        j = <int64_t>_randbelow(state, <uint64_t>(i + 1))
        tmp = order[i]; order[i] = order[j]; order[j] = tmp
    u53 = _next64(state) >> 11
    prod = (<int128>u53) * den + M53_MASK
    pos = <int64_t>(prod >> 53)
    c = pos
    prev_ceil = (c + den - 1) // den
    for k in range(s):
        i = <Py_ssize_t>order[k]
        c += fr[i]
        cur_ceil = (c + den - 1) // den
        seats[i] = floors[i] + (cur_ceil - prev_ceil)
        prev_ceil = cur_ceil


def simulate_batch(list scheme_floors, list frac_nums, den,
                   list quota_floors, list quota_ceils, list lower_bounds,
                   master_seed, n, house_size):
    cdef Py_ssize_t s = len(frac_nums)
    cdef int64_t cden = den
    cdef uint64_t master = <uint64_t>(master_seed & 0xFFFFFFFFFFFFFFFF)
    cdef int64_t reps = n
    cdef int64_t house = house_size
    cdef int64_t *fr = _to_i64(frac_nums)
    cdef int64_t *fl = _to_i64(scheme_floors)
    cdef int64_t *qf = _to_i64(quota_floors)
    cdef int64_t *qc = _to_i64(quota_ceils)
    cdef int64_t *lb = _to_i64(lower_bounds)
    cdef int64_t *sums = <int64_t*>malloc(s * sizeof(int64_t))
    cdef int64_t *sumsqs = <int64_t*>malloc(s * sizeof(int64_t))
    cdef int64_t *order = <int64_t*>malloc(s * sizeof(int64_t))
    cdef int64_t *seats = <int64_t*>malloc(s * sizeof(int64_t))
    cdef int64_t *mask_counts = NULL
    cdef bint track_masks = s <= 16
    if track_masks:
        mask_counts = <int64_t*>malloc((1 << s) * sizeof(int64_t))
    cdef int64_t qviol = 0, bviol = 0, mismatches = 0
    cdef int64_t k
    cdef Py_ssize_t i
    cdef uint64_t state, mask
    cdef bint bad_quota, bad_bound
    cdef int64_t a, total
    for i in range(s):
        sums[i] = 0
        sumsqs[i] = 0
    if track_masks:
        for k in range(1 << s):
            mask_counts[k] = 0
    with nogil:
        for k in range(reps):
            state = _child_seed(master, <uint64_t>k)
            _scheme_replicate(&state, fr, fl, order, seats, s, cden)
            bad_quota = False
            bad_bound = False
            mask = 0
            total = 0
            for i in range(s):
                a = seats[i]
                total += a
                sums[i] += a
                sumsqs[i] += a * a
                if a < qf[i] or a > qc[i]:
                    bad_quota = True
                if a < lb[i]:
                    bad_bound = True
                if track_masks and a > fl[i]:
                    mask |= (<uint64_t>1) << i
            if bad_quota:
                qviol += 1
            if bad_bound:
                bviol += 1
            if total != house:
                mismatches += 1
            if track_masks:
                mask_counts[mask] += 1
    out_sums = [sums[i] for i in range(s)]
    out_sumsqs = [sumsqs[i] for i in range(s)]
    out_masks = None
    if track_masks:
        out_masks = [mask_counts[k] for k in range(1 << s)]
        free(mask_counts)
    free(fr); free(fl); free(qf); free(qc); free(lb)
    free(sums); free(sumsqs); free(order); free(seats)
    return out_sums, out_sumsqs, int(qviol), int(bviol), int(mismatches), out_masks


def conditional_batch(list weight_nums, r_sel, master_seed, n, cap):
    cdef Py_ssize_t s = len(weight_nums)
    cdef int64_t rsel = r_sel
    cdef uint64_t master = <uint64_t>(master_seed & 0xFFFFFFFFFFFFFFFF)
    cdef int64_t reps = n
    cdef int64_t attempts_cap = cap
    cdef int64_t *w = _to_i64(weight_nums)
    cdef int64_t *counts = <int64_t*>malloc(s * sizeof(int64_t))
    cdef int64_t *chosen = <int64_t*>malloc((rsel if rsel else 1) * sizeof(int64_t))
    cdef int64_t total = 0
    cdef int64_t k, attempt, failures = 0
    cdef Py_ssize_t i
    cdef int64_t t, a, b, v, acc, idx
    cdef uint64_t state
    cdef bint distinct, ok
    for i in range(s):
        counts[i] = 0
        total += w[i]
    with nogil:
        for k in range(reps):
            state = _child_seed(master, <uint64_t>k)
            ok = False
            for attempt in range(attempts_cap):
                for t in range(rsel):
                    v = <int64_t>_randbelow(&state, <uint64_t>total)
                    acc = 0
                    idx = s - 1
                    for i in range(s):
                        acc += w[i]
                        if v < acc:
                            idx = i
                            break
                    chosen[t] = idx
                distinct = True
                for a in range(rsel):
                    for b in range(a + 1, rsel):
                        if chosen[a] == chosen[b]:
                            distinct = False
                            break
                    if not distinct:
                        break
                if distinct:
                    ok = True
                    break
            if ok:
                for t in range(rsel):
                    counts[chosen[t]] += 1
            else:
                failures += 1
    out = [counts[i] for i in range(s)]
    free(w); free(counts); free(chosen)
    return out, int(failures)


def resample_batch(list scheme_floors, list frac_nums, den,
                   list target_floors, list target_ceils,
                   master_seed, n, cap):
    cdef Py_ssize_t s = len(frac_nums)
    cdef int64_t cden = den
    cdef uint64_t master = <uint64_t>(master_seed & 0xFFFFFFFFFFFFFFFF)
    cdef int64_t reps = n
    cdef int64_t rounds_cap = cap
    cdef int64_t *fr = _to_i64(frac_nums)
    cdef int64_t *fl = _to_i64(scheme_floors)
    cdef int64_t *tf = _to_i64(target_floors)
    cdef int64_t *tc = _to_i64(target_ceils)
    cdef int64_t *sums = <int64_t*>malloc(s * sizeof(int64_t))
    cdef int64_t *sumsqs = <int64_t*>malloc(s * sizeof(int64_t))
    cdef int64_t *order = <int64_t*>malloc(s * sizeof(int64_t))
    cdef int64_t *seats = <int64_t*>malloc(s * sizeof(int64_t))
    cdef int64_t k, attempt, rounds_total = 0, failures = 0
    cdef Py_ssize_t i
    cdef uint64_t state
    cdef bint good, ok
    for i in range(s):
        sums[i] = 0
        sumsqs[i] = 0
    with nogil:
        for k in range(reps):
            state = _child_seed(master, <uint64_t>k)
            ok = False
            for attempt in range(1, rounds_cap + 1):
                _scheme_replicate(&state, fr, fl, order, seats, s, cden)
                good = True
                for i in range(s):
                    if seats[i] < tf[i] or seats[i] > tc[i]:
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
    out_sums = [sums[i] for i in range(s)]
    out_sumsqs = [sumsqs[i] for i in range(s)]
    free(fr); free(fl); free(tf); free(tc)
    free(sums); free(sumsqs); free(order); free(seats)
    return out_sums, out_sumsqs, int(rounds_total), int(failures)
