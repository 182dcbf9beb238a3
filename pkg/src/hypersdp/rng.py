"""Counter-based randomness built on the SplitMix64 mixer.

Every random draw is a pure function of (64-bit seed, stream tag, counter),
so per-edge draws keyed by the edge's combinatorial rank are reproducible
regardless of enumeration order or parallel sharding.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def _finalize(z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):  # wrap-around is the point
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        return z ^ (z >> np.uint64(31))


def splitmix64(state: int | np.ndarray) -> np.ndarray:
    """SplitMix64 output for the given state word(s)."""
    z = np.asarray(state, dtype=np.uint64) + _GOLDEN
    return _finalize(z)


def derive_seed(seed: int, *words: int) -> int:
    """Fold integer words into a 64-bit sub-seed (used for trial/stream splitting)."""
    state = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
    with np.errstate(over="ignore"):
        for w in words:
            state = _finalize((state ^ np.uint64(w & 0xFFFFFFFFFFFFFFFF)) + _GOLDEN)
    return int(state)


def counter_uniforms(seed: int, counters: np.ndarray) -> np.ndarray:
    """Uniform[0, 1) draws keyed by counter value under the given seed."""
    c = np.asarray(counters, dtype=np.uint64)
    z = _finalize(np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + (c + np.uint64(1)) * _GOLDEN)
    return (z >> np.uint64(11)) * 2.0**-53


def generator(seed: int, *words: int) -> np.random.Generator:
    """Standard numpy generator for non-keyed sampling, derived from the master seed."""
    return np.random.default_rng(derive_seed(seed, *words))
