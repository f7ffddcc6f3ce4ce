"""Counter-based random streams keyed by (stream, node, round).

Every draw is a pure function of the master seed and its key, so results do
not depend on the order in which nodes are stepped.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15

NODE_STREAM = 1
ADVERSARY_STREAM = 2
GRAPH_STREAM = 3


def mix64(x: int) -> int:
    """splitmix64 finalizer."""
    x = (x + GOLDEN) & MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK
    return x ^ (x >> 31)


def derive(*parts: int) -> int:
    h = 0
    for p in parts:
        h = mix64(h ^ (p & MASK))
    return h


class Stream:
    """Sequence of 64-bit words ``mix64(key + i * GOLDEN)`` for i = 0, 1, ..."""

    __slots__ = ("key", "counter")

    def __init__(self, key: int) -> None:
        self.key = key
        self.counter = 0

    def u64(self) -> int:
        self.counter += 1
        return mix64((self.key + self.counter * GOLDEN) & MASK)

    def below(self, k: int) -> int:
        if k <= 0:
            raise ValueError("below() needs a positive bound")
        return (self.u64() * k) >> 64

    def random(self) -> float:
        return (self.u64() >> 11) * (1.0 / (1 << 53))

    def bernoulli(self, p: Fraction | float) -> bool:
        if isinstance(p, Fraction):
            return self.u64() * p.denominator < p.numerator << 64
        return self.random() < p

    def choice(self, seq):
        return seq[self.below(len(seq))]


@dataclass(frozen=True)
class SeedPlan:
    master_seed: int
    node_salt: int = 0

    def node_stream(self, node: int, round: int) -> Stream:
        return Stream(derive(self.master_seed, NODE_STREAM, self.node_salt, node, round))

    def adversary_stream(self, round: int) -> Stream:
        return Stream(derive(self.master_seed, ADVERSARY_STREAM, round))

    def graph_seed(self) -> int:
        return derive(self.master_seed, GRAPH_STREAM) & 0x7FFFFFFF
