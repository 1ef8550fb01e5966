"""Deterministic random-stream derivation.

Every stochastic step draws from a generator derived from a master seed
plus a structural key (replicate index, permutation index, purpose tag).
Streams are therefore independent of execution order and worker count.
"""

from __future__ import annotations

import numpy as np


def substream(seed: int, *key: int) -> np.random.Generator:
    """Generator for the (seed, key) substream."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def substream_seed(seed: int, *key: int) -> int:
    """Derived integer seed for APIs that take a single seed."""
    ss = np.random.SeedSequence(seed, spawn_key=key)
    return int(ss.generate_state(1, dtype=np.uint64)[0])
