"""Deterministic, platform-independent randomness for reproducible manifests.

The generator is SplitMix64 (Steele, Lea & Flood 2014; Vigna's public-domain
reference implementation), a 64-bit algorithm with published reference
outputs, e.g. seed 1234567 yields

    6457827717110365317, 3203168211198807973, 9817491932198370423, ...

Bounded draws use rejection sampling so shuffles are unbiased, and shuffling
is textbook Fisher-Yates. Identical seeds give identical permutations on any
platform and Python build.
"""

from __future__ import annotations

from typing import MutableSequence

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(value: int) -> int:
    """One SplitMix64 output step applied to an arbitrary 64-bit value."""
    z = (value + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


class SplitMix64:
    """SplitMix64 stream over a 64-bit state."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return (z ^ (z >> 31)) & _MASK64

    def randbelow(self, bound: int) -> int:
        """Uniform integer in [0, bound) via rejection sampling."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        # Reject draws from the final partial block of the 64-bit range.
        limit = _MASK64 + 1 - ((_MASK64 + 1) % bound)
        while True:
            value = self.next_u64()
            if value < limit:
                return value % bound

    def uniform(self) -> float:
        """Float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (2.0**-53)

    def shuffle(self, items: MutableSequence) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]


def _fnv1a64(text: str) -> int:
    value = 0xCBF29CE484222325
    for byte in text.encode("utf-8"):
        value = ((value ^ byte) * 0x100000001B3) & _MASK64
    return value


def derive_seed(seed: int, label: str) -> int:
    """Fan one user seed out into independent per-stage streams.

    The derived seed is ``mix64(seed XOR fnv1a64(label))``: stable across
    runs, distinct per label, documented so other implementations can match.
    """
    return mix64((seed & _MASK64) ^ _fnv1a64(label))
