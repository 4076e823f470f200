"""Deterministic RNG stream derivation.

Every stochastic stage derives its generator from the global run seed plus
a stable label (stage name, household id, ...).  Streams are therefore
independent of execution order, worker count, and platform.
"""

import zlib

import numpy as np


def _as_entropy(key) -> int:
    if isinstance(key, str):
        return zlib.crc32(key.encode("utf-8"))
    return int(key)


def seed_sequence(seed: int, *keys) -> np.random.SeedSequence:
    """SeedSequence derived from the run seed and a path of sub-keys."""
    return np.random.SeedSequence([int(seed)] + [_as_entropy(k) for k in keys])


def rng_for(seed: int, *keys) -> np.random.Generator:
    """Generator on an independent stream identified by (seed, *keys)."""
    return np.random.default_rng(seed_sequence(seed, *keys))
