"""Deterministic seed derivation shared by every randomized component.

All randomness in the harness flows through ``numpy.random.default_rng``
seeded with a child seed produced by :func:`mix64`. The mixing function is
fixed and documented here so that independent implementations can reproduce
identical sub-streams: it is a splitmix64-style chain over 64-bit integers.

``mix64(seed, *context)`` computes, with all arithmetic modulo 2**64::

    acc = seed
    for part in context:
        acc = scramble((acc ^ part) + 0x9E3779B97F4A7C15)

    scramble(z):
        z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
        z ^= z >> 27;  z *= 0x94D049BB133111EB
        z ^= z >> 31
        return z

Negative parts are reduced to their two's-complement 64-bit representation.
The child seed feeds NumPy's PCG64 generator; the generator family and the
selection algorithms built on it are part of the reproducibility contract of
this package and are documented in the README.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _scramble(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK64
    return z ^ (z >> 31)


def mix64(seed: int, *context: int) -> int:
    """Fold ``context`` integers into ``seed``, returning a 64-bit child seed.

    The chain is order sensitive: ``mix64(s, a, b) != mix64(s, b, a)`` in
    general, which is what keeps (sample, epoch, batch) sub-streams apart.
    """
    acc = seed & _MASK64
    if not context:
        acc = _scramble((acc + _GOLDEN) & _MASK64)
    for part in context:
        acc = _scramble(((acc ^ (part & _MASK64)) + _GOLDEN) & _MASK64)
    return acc


def derive_rng(seed: int, *context: int) -> np.random.Generator:
    """A PCG64 generator seeded with ``mix64(seed, *context)``."""
    return np.random.default_rng(mix64(seed, *context))
