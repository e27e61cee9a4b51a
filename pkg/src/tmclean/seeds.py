"""Seed derivation so that independent streams (trees, repetitions) never collide."""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    x = (x + _GOLDEN) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def derive_seed(master: int, index: int) -> int:
    """Seed of the ``index``-th child stream: ``splitmix64(splitmix64(master) + index)``."""
    return splitmix64((splitmix64(master & _MASK) + index) & _MASK)
