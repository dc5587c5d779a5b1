"""Deterministic seed derivation.

Every randomized routine takes an integer seed and builds its own
``numpy.random.Generator``; derived seeds come from :func:`derive_seed`,
a splitmix64 finalizer applied to ``master + golden * (index + 1)``.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    x = (x + GOLDEN) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, index: int) -> int:
    """64-bit child seed for (master, index); stable across platforms."""
    return splitmix64((int(master) + GOLDEN * (int(index) + 1)) & MASK64)


def make_rng(seed: int | None) -> np.random.Generator:
    if seed is None:
        seed = 0
    return np.random.Generator(np.random.PCG64(int(seed) & MASK64))
