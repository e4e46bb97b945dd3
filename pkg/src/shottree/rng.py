"""Counter-based random streams keyed by a node's path in the simulation tree.

Every tree node draws from its own SplitMix64 stream whose starting state is
a 64-bit hash of ``(master_seed, depth, child-index path)``.  Results are
therefore independent of traversal order and worker count.

Hash definition (all arithmetic mod 2**64, ``mix`` = SplitMix64 finalizer)::

    h = mix(master_seed ^ ROOT_KEY)
    for depth, child in enumerate(path):
        h = mix(h ^ mix(((depth + 1) << 40) ^ child))

A stream with state ``s`` yields ``mix(s + GOLDEN)``, ``mix(s + 2*GOLDEN)``...;
uniforms use the top 53 bits.  ``numba`` kernels in ``_kernels`` implement the
same functions bit-for-bit.
"""
from __future__ import annotations

from typing import Iterable

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
ROOT_KEY = 0xD1B54A32D192ED03
_INV53 = 1.0 / (1 << 53)


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def root_key(master_seed: int) -> int:
    return mix64((master_seed & MASK64) ^ ROOT_KEY)


def child_key(parent: int, depth: int, child: int) -> int:
    return mix64(parent ^ mix64(((depth + 1) << 40) ^ child))


def path_key(master_seed: int, path: Iterable[int]) -> int:
    h = root_key(master_seed)
    for depth, child in enumerate(path):
        h = child_key(h, depth, child)
    return h


class RandomStream:
    """Sequential uniform draws from one SplitMix64 stream."""

    __slots__ = ("state",)

    def __init__(self, key: int = 0):
        self.state = key & MASK64

    @classmethod
    def for_path(cls, master_seed: int, path: Iterable[int]) -> "RandomStream":
        return cls(path_key(master_seed, path))

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def random(self) -> float:
        """Uniform float in [0, 1)."""
        return (self.next_u64() >> 11) * _INV53
