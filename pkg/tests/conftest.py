"""Shared helpers for the test suite: independent oracles come first.

Every derived expected value in these tests is computed by a route that does
not go through the code under test (numpy/scipy closed forms, brute
enumeration, or hand-checked constants) before the library is called.
"""

import numpy as np
import pytest

from veronese.balls import BaseNorm, vector_norm

BASES = (BaseNorm.L1, BaseNorm.L2, BaseNorm.LINF)


def rank_one(factors):
    """Outer product x_1 (x) ... (x) x_d as a dense array."""
    t = np.array(1.0)
    for x in factors:
        t = np.multiply.outer(t, np.asarray(x, dtype=float))
    return t


def norm_product(factors, base):
    return float(np.prod([vector_norm(np.asarray(x, dtype=float), base)
                          for x in factors]))


@pytest.fixture
def rng():
    return np.random.default_rng(20260815)
