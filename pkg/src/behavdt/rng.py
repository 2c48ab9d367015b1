"""Portable seeded PRNG used for every random choice in the package.

The generator is xorshift64* (Vigna, 2016) seeded through one round of
splitmix64, so a given integer seed produces the same stream in any
language that implements the two published recurrences:

    splitmix64:  z = (s + 0x9E3779B97F4A7C15) mod 2**64
                 z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 mod 2**64
                 z = (z ^ (z >> 27)) * 0x94D049BB133111EB mod 2**64
                 state = z ^ (z >> 31)            (0 is replaced by 1)

    xorshift64*: x ^= x >> 12; x ^= x << 25; x ^= x >> 27 (all mod 2**64)
                 output = x * 0x2545F4914F6CDD1D mod 2**64

Bounded integers use rejection sampling (``below``) and floats use the
top 53 bits (``random``).
"""

from __future__ import annotations

from typing import MutableSequence, TypeVar

_MASK = (1 << 64) - 1

T = TypeVar("T")


def splitmix64(seed: int) -> int:
    z = (seed + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class XorShift64Star:
    """xorshift64* generator with splitmix64 seeding."""

    __slots__ = ("state",)

    def __init__(self, seed: int) -> None:
        self.state = splitmix64(seed & _MASK) or 1

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & _MASK
        x ^= x >> 27
        self.state = x
        return (x * 0x2545F4914F6CDD1D) & _MASK

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` without modulo bias."""
        if n <= 0:
            raise ValueError(f"bound must be positive, got {n}")
        # reject the low tail so the remaining range is a multiple of n
        floor = ((1 << 64) - n) % n
        while True:
            x = self.next_u64()
            if x >= floor:
                return x % n

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def shuffle(self, items: MutableSequence[T]) -> None:
        """In-place Fisher-Yates shuffle (descending index form)."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
