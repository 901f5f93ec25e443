"""Deterministic, platform-independent pseudo-random source.

Every random decision in seatlot flows through :class:`SeededSource`, a
SplitMix64 generator.  SplitMix64 is a tiny, well-studied 64-bit generator
(the canonical seeder for the xoshiro family): the state advances by a fixed
odd constant and each output is a bit-mixing finalizer of the state.  It is
implemented here, rather than taken from :mod:`random`, so that the exact
output sequence is pinned by this file alone and can be replicated verbatim
by the compiled kernels.

Reproducibility contract:

* identical seeds produce identical output sequences on every platform,
  Python version and backend (compiled or pure);
* ``child(k)`` derives an independent stream as a pure function of
  ``(seed, k)``, so parallel replicates can be generated in any order;
* integers below a bound come from unbiased rejection sampling
  (draws with value >= ``(2**64 // n) * n`` are discarded).
"""

from __future__ import annotations

from fractions import Fraction

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

U53_DENOMINATOR = 1 << 53


def mix64(value: int) -> int:
    """SplitMix64 output finalizer (variant 13 of Stafford's mixers)."""
    z = value & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def child_seed(master_seed: int, index: int) -> int:
    """Seed for child stream ``index``, a pure function of its arguments.

    Children of one master are spaced along the SplitMix64 orbit and then
    mixed, which keeps distinct (master, index) pairs from colliding in
    practice.  The compiled kernels use this exact formula.
    """
    if index < 0:
        raise ValueError("child index must be non-negative")
    return mix64((master_seed + (index + 1) * _GOLDEN) & _MASK64)


class SeededSource:
    """SplitMix64 stream with explicit 64-bit seeding.

    Not shareable across threads: concurrent tasks should each derive their
    own stream with :meth:`child`.
    """

    __slots__ = ("seed", "_state")

    def __init__(self, seed: int):
        self.seed = seed & _MASK64
        self._state = self.seed

    def __repr__(self):
        return f"SeededSource(seed={self.seed})"

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        return mix64(self._state)

    def bits53(self) -> int:
        """Uniform integer in [0, 2**53): the top 53 bits of one output."""
        return self.next_u64() >> 11

    def uniform_fraction(self) -> Fraction:
        """Uniform rational k / 2**53; exact, suitable for interval tests."""
        return Fraction(self.bits53(), U53_DENOMINATOR)

    def randbelow(self, n: int) -> int:
        """Unbiased uniform integer in [0, n)."""
        if n <= 0:
            raise ValueError("randbelow bound must be positive")
        if n == 1:
            return 0
        limit = ((1 << 64) // n) * n
        while True:
            draw = self.next_u64()
            if draw < limit:
                return draw % n

    def shuffled_range(self, n: int) -> list[int]:
        """Fisher-Yates shuffle of [0, n), consuming randbelow(i+1) for
        i = n-1 .. 1.  The compiled kernels replay the same order."""
        order = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.randbelow(i + 1)
            order[i], order[j] = order[j], order[i]
        return order

    def child(self, index: int) -> "SeededSource":
        """Independent stream derived from (self.seed, index)."""
        return SeededSource(child_seed(self.seed, index))
