"""SplitMix64 random streams with per-trial seed splitting.

Every stochastic routine in the package draws from :class:`SplitMix64`.
Trial ``t`` of a batch seeded with ``master_seed`` uses the stream whose
initial state is ``mix64(master_seed, t)``, so results never depend on how
trials are distributed across workers.

Bit-exact definitions (all arithmetic modulo 2**64)::

    GOLDEN = 0x9E3779B97F4A7C15
    finalize(z):
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
        z = (z ^ (z >> 27)) * 0x94D049BB133111EB
        return z ^ (z >> 31)
    mix64(seed, t) = finalize(seed + (t + 1) * GOLDEN)
    next_u64():  state += GOLDEN; return finalize(state)
    bounded(s):  threshold = (2**64 - s) % s
                 draw x = next_u64() until x >= threshold; return x % s
    random():    (next_u64() >> 11) * 2**-53

The numba kernels in :mod:`seatlab.forward` and :mod:`seatlab.pd` replicate
these formulas and are tested against this module.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_INV53 = 1.0 / (1 << 53)


def finalize(z: int) -> int:
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def mix64(seed: int, t: int) -> int:
    """Initial stream state for trial ``t`` of a batch seeded with ``seed``."""
    return finalize((seed + (t + 1) * GOLDEN) & MASK64)


class SplitMix64:
    """Small deterministic 64-bit generator."""

    __slots__ = ("state",)

    def __init__(self, state: int):
        self.state = state & MASK64

    @classmethod
    def for_trial(cls, master_seed: int, t: int) -> "SplitMix64":
        return cls(mix64(master_seed, t))

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return finalize(self.state)

    def bounded(self, s: int) -> int:
        """Uniform integer in ``[0, s)`` by modulo with rejection."""
        if s <= 0:
            raise ValueError("bound must be positive")
        threshold = ((1 << 64) - s) % s
        x = self.next_u64()
        while x < threshold:
            x = self.next_u64()
        return x % s

    def random(self) -> float:
        return (self.next_u64() >> 11) * _INV53

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates, ascending: position i takes a uniform pick from i..end."""
        size = len(items)
        for i in range(size - 1):
            j = i + self.bounded(size - i)
            items[i], items[j] = items[j], items[i]
