"""Seeded random streams.

Every random decision derives from one master seed.  A stream is addressed by
a tuple key, e.g. ``(trial, CHOP)`` or ``(trial, SPARSIFY, component)``, so any
single phase of any trial can be replayed in isolation.
"""
import numpy as np

DEFAULT_SEED = 20240501

# phase tags used as the second element of a stream key
CHOP = 0
SPARSIFY = 1
PATTERN = 2

LAYOUT = "key=(trial, phase[, component]); phase 0=chop, 1=sparsify, 2=pattern"


def stream(seed, *key):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key)))


def as_rng(rng):
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)
