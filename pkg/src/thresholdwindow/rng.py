"""Reproducible random-number plumbing.

All randomness in the package flows through numpy's Philox bit generator, a
documented counter-based PRNG (Philox-4x64-10, Salmon et al. 2011).  Every
Monte Carlo sample gets its own stream whose 64-bit seed is a SplitMix64 hash
of the run's base seed and the sample index:

    stream_seed(base, k) = splitmix64(base XOR splitmix64((k + 1) * GOLDEN))

with GOLDEN = 0x9E3779B97F4A7C15.  The derivation is a pure function of
(base, k), so results are independent of worker count and scheduling, and any
single sample can be regenerated in isolation.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """One SplitMix64 finalizer round (Steele, Lea & Flood 2014)."""
    z = (x + GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return (z ^ (z >> 31)) & MASK64


def stream_seed(base_seed: int, index: int) -> int:
    """64-bit seed of Monte Carlo stream ``index`` under ``base_seed``."""
    if index < 0:
        raise ValueError("stream index must be nonnegative")
    return splitmix64((base_seed & MASK64) ^ splitmix64(((index + 1) * GOLDEN) & MASK64))


def generator(seed: int) -> np.random.Generator:
    """Philox generator for a 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=seed & MASK64))


def stream(base_seed: int, index: int) -> np.random.Generator:
    """Generator for Monte Carlo sample ``index`` under ``base_seed``."""
    return generator(stream_seed(base_seed, index))
