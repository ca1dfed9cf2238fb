"""Deterministic 64-bit random streams.

A tiny splitmix64 generator is implemented by hand (rather than wrapping
numpy or the stdlib) so that the compiled and pure-Python kernels can
consume exactly the same stream of draws, bit for bit, on any platform.
"""

from __future__ import annotations

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15
_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


def mix64(z: int) -> int:
    """Finalizer of splitmix64: a bijective mixing permutation on 64 bits."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(base_seed: int, trial_index: int) -> int:
    """Per-trial seed: mixing permutation of base_seed XOR trial_index.

    Injective in trial_index for a fixed base (XOR is injective, mix64 is
    a bijection), so parallel trials never share a stream.
    """
    return mix64((base_seed ^ trial_index) & _MASK64)


class RngStream:
    """splitmix64 stream. Identical seed => identical draw sequence."""

    __slots__ = ("seed", "state")

    def __init__(self, seed: int):
        self.seed = seed & _MASK64
        self.state = self.seed

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK64
        return mix64(self.state)

    def next_double(self) -> float:
        """Uniform in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * _INV_2_53

    def next_below(self, bound: int) -> int:
        """Uniform integer in [0, bound) via 64-bit multiply-high.

        Bias is O(bound / 2**64), negligible for any bound used here.
        """
        return (self.next_u64() * bound) >> 64

    def bernoulli(self, prob: float) -> bool:
        return self.next_double() < prob
