"""Kernel backend selection.

The compiled extension (``seatlot._kernels_c``) is used when it imported
successfully, the environment variable ``SEATLOT_PURE_PYTHON`` is unset (or
``0``), and the integer magnitudes of a given call fit comfortably inside
the extension's 64-bit arithmetic.  Otherwise the call falls through to the
pure-Python kernels, which handle arbitrary precision.
"""

from __future__ import annotations

import math
import os

from . import _kernels_py

try:  # pragma: no cover - exercised implicitly by the chosen backend
    from . import _kernels_c
except ImportError:  # pragma: no cover
    _kernels_c = None

if os.environ.get("SEATLOT_PURE_PYTHON", "0") not in ("", "0"):
    _kernels_c = None

ACTIVE = "compiled" if _kernels_c is not None else "pure-python"

# Compiled kernels compute cell positions up to den * (residual + 2) and
# accumulate cell lengths up to den * (number of orderings); keep a wide
# margin below 2**63.
_CAP = 1 << 62


def _residual(frac_nums, den):
    return sum(frac_nums) // den


def systematic_round_ints(frac_nums, den, u_num):
    if _kernels_c is not None and den * (_residual(frac_nums, den) + 2) < _CAP:
        return _kernels_c.systematic_round_ints(frac_nums, den, u_num)
    return _kernels_py.systematic_round_ints(frac_nums, den, u_num)


def position_from_bits53(u53, den):
    # Single big-int multiply; never worth dispatching.
    return _kernels_py.position_from_bits53(u53, den)


def fixed_order_cells(frac_nums, den):
    if _kernels_c is not None and den * (_residual(frac_nums, den) + 2) < _CAP:
        return _kernels_c.fixed_order_cells(frac_nums, den)
    return _kernels_py.fixed_order_cells(frac_nums, den)


def averaged_mask_lengths(frac_nums, den, fix_last):
    s = len(frac_nums)
    if _kernels_c is not None and s <= 16:
        orders = math.factorial(s - 1 if (fix_last and s > 1) else s)
        if (den * (_residual(frac_nums, den) + 2) < _CAP
                and den * orders < _CAP):
            return _kernels_c.averaged_mask_lengths(frac_nums, den, fix_last)
    return _kernels_py.averaged_mask_lengths(frac_nums, den, fix_last)


def simulate_batch(scheme_floors, frac_nums, den, quota_floors, quota_ceils,
                   lower_bounds, master_seed, n, house_size):
    if _kernels_c is not None:
        r_max = max((f + 1 for f in scheme_floors), default=1)
        r_top = sum(scheme_floors) + _residual(frac_nums, den)
        if (den * (_residual(frac_nums, den) + 2) < _CAP
                and n * (r_top + 1) * (r_top + 1) < _CAP
                and r_max < _CAP):
            return _kernels_c.simulate_batch(
                scheme_floors, frac_nums, den, quota_floors, quota_ceils,
                lower_bounds, master_seed, n, house_size)
    return _kernels_py.simulate_batch(
        scheme_floors, frac_nums, den, quota_floors, quota_ceils,
        lower_bounds, master_seed, n, house_size)


def conditional_batch(weight_nums, r_sel, master_seed, n, cap):
    if _kernels_c is not None and sum(weight_nums) < _CAP:
        return _kernels_c.conditional_batch(weight_nums, r_sel, master_seed,
                                            n, cap)
    return _kernels_py.conditional_batch(weight_nums, r_sel, master_seed,
                                         n, cap)


def resample_batch(scheme_floors, frac_nums, den, target_floors, target_ceils,
                   master_seed, n, cap):
    if _kernels_c is not None:
        r_top = sum(scheme_floors) + _residual(frac_nums, den)
        if (den * (_residual(frac_nums, den) + 2) < _CAP
                and n * (r_top + 1) * (r_top + 1) < _CAP):
            return _kernels_c.resample_batch(
                scheme_floors, frac_nums, den, target_floors, target_ceils,
                master_seed, n, cap)
    return _kernels_py.resample_batch(
        scheme_floors, frac_nums, den, target_floors, target_ceils,
        master_seed, n, cap)
