"""Search-space primitives and the OneMax / jump fitness functions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .rng import RngStream


class BitString:
    """Immutable fixed-length binary search point.

    Internally a bytes object of 0/1 values with a cached one-bit count,
    giving O(1) bit access and cheap OneMax evaluation.
    """

    __slots__ = ("_bits", "_ones")

    def __init__(self, bits: Iterable[int]):
        b = bytes(bits)
        if any(v not in (0, 1) for v in b):
            raise ValueError("bit values must be 0 or 1")
        if len(b) == 0:
            raise ValueError("bit string must be non-empty")
        self._bits = b
        self._ones = sum(b)

    @classmethod
    def zeros(cls, n: int) -> "BitString":
        return cls(bytes(n))

    @classmethod
    def ones(cls, n: int) -> "BitString":
        return cls(b"\x01" * n)

    @classmethod
    def from_string(cls, s: str) -> "BitString":
        return cls(int(ch) for ch in s)

    @classmethod
    def random(cls, n: int, rng: RngStream) -> "BitString":
        return cls(1 if rng.bernoulli(0.5) else 0 for _ in range(n))

    @property
    def n(self) -> int:
        return len(self._bits)

    @property
    def ones_count(self) -> int:
        return self._ones

    def to_bytes(self) -> bytes:
        return self._bits

    def flip(self, positions: Sequence[int]) -> "BitString":
        buf = bytearray(self._bits)
        for q in positions:
            buf[q] ^= 1
        return BitString(buf)

    def __len__(self) -> int:
        return len(self._bits)

    def __getitem__(self, i: int) -> int:
        return self._bits[i]

    def __iter__(self):
        return iter(self._bits)

    def __eq__(self, other) -> bool:
        return isinstance(other, BitString) and self._bits == other._bits

    def __hash__(self) -> int:
        return hash(self._bits)

    def __repr__(self) -> str:
        return f"BitString({''.join(str(v) for v in self._bits)})"


@dataclass(frozen=True)
class JumpProblem:
    """A jump-function instance: string length n and jump size k.

    k = 1 degenerates to OneMax and is rejected; valid instances have
    2 <= k <= n. The theory operations additionally require k <= n/4 and
    enforce that themselves.
    """

    n: int
    k: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if not 2 <= self.k <= self.n:
            raise ValueError(f"k must be in [2..n], got k={self.k}, n={self.n}")


def one_max(x: BitString) -> int:
    """Number of one-bits."""
    return x.ones_count


def jump_fitness_from_om(problem: JumpProblem, om: int) -> int:
    """Jump fitness as a function of the one-bit count alone."""
    n, k = problem.n, problem.k
    if om <= n - k or om == n:
        return om + k
    return n - om


def jump_fitness(problem: JumpProblem, x: BitString) -> int:
    if x.n != problem.n:
        raise ValueError(f"bit string length {x.n} != problem n {problem.n}")
    return jump_fitness_from_om(problem, x.ones_count)


def hamming(x: BitString, y: BitString) -> int:
    if x.n != y.n:
        raise ValueError(f"length mismatch: {x.n} != {y.n}")
    return sum(a != b for a, b in zip(x.to_bytes(), y.to_bytes()))


def sample_positions(n: int, m: int, rng: RngStream) -> list[int]:
    """m distinct positions in [0, n), uniform over all m-subsets.

    Partial Fisher-Yates; positions are returned in selection order.
    """
    if not 0 <= m <= n:
        raise ValueError(f"subset size {m} out of [0..{n}]")
    idx = list(range(n))
    for j in range(m):
        r = j + rng.next_below(n - j)
        idx[j], idx[r] = idx[r], idx[j]
    return idx[:m]


def make_local_optimum(problem: JumpProblem, rng: RngStream) -> BitString:
    """A uniformly random plateau point: exactly n-k ones."""
    buf = bytearray(b"\x01" * problem.n)
    for q in sample_positions(problem.n, problem.k, rng):
        buf[q] = 0
    return BitString(buf)


def is_global_optimum(problem: JumpProblem, x: BitString) -> bool:
    if x.n != problem.n:
        raise ValueError(f"bit string length {x.n} != problem n {problem.n}")
    return x.ones_count == problem.n
