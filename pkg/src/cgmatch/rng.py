"""Deterministic, splittable random streams backed by the counter-based Philox generator."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


def _mix64(a: int, b: int) -> int:
    # splitmix64-style finalizer; keeps derived streams collision-free in practice
    x = (a * 0x9E3779B97F4A7C15 + b + 0xD1B54A32D192ED03) & _MASK64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _MASK64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _MASK64
    x ^= x >> 31
    return x


@dataclass(frozen=True)
class RngSeed:
    """A (seed, stream) pair naming one reproducible random stream.

    The same pair yields bit-identical draw sequences regardless of
    platform, process or thread count.  Sub-streams derived via
    :meth:`child` are independent of the parent and of each other, so
    work items can consume randomness in any scheduling order.
    """

    seed: int
    stream: int = 0

    def __post_init__(self) -> None:
        if not 0 <= int(self.seed) <= _MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if not 0 <= int(self.stream) <= _MASK64:
            raise ValueError("stream must be an unsigned 64-bit integer")

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream."""
        key = np.array([self.seed, self.stream], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, index: int) -> "RngSeed":
        """Derive the index-th sub-stream."""
        return RngSeed(self.seed, _mix64(self.stream, index))

    def children(self, count: int) -> list["RngSeed"]:
        return [self.child(i) for i in range(count)]
