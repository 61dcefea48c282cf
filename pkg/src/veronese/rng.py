"""Deterministic random streams.

Sub-streams are derived from (seed, *path) entropy tuples so that a routine's
randomness depends only on its seed and its own path, never on call order.
"""

from __future__ import annotations

import numpy as np


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def child_rng(seed: int, *path: int) -> np.random.Generator:
    entropy = (int(seed),) + tuple(int(p) for p in path)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))
