"""Compiled kernels vs the numpy reference: parity and backend selection."""

import itertools
import subprocess
import sys

import numpy as np
import pytest

from veronese import _kernels
from veronese._kernels import pykernels

HAVE_C = _kernels.HAVE_C
needs_c = pytest.mark.skipif(not HAVE_C, reason="compiled kernels unavailable")


def test_backend_name_consistent():
    assert _kernels.BACKEND in ("c", "python")
    assert (_kernels.BACKEND == "c") == HAVE_C


def test_pivot_reference_semantics():
    # oracle: one Gauss pivot written out longhand
    T = np.array([[2.0, 1.0, 4.0],
                  [6.0, 3.0, 2.0],
                  [1.0, -1.0, 0.5]])
    want = T.copy()
    want[0] = want[0] / want[0, 0]
    for i in (1, 2):
        want[i] = want[i] - want[i, 0] * want[0]
    got = T.copy()
    pykernels.pivot_update(got, 0, 0)
    # the pivot column is forced to its exact unit form
    np.testing.assert_allclose(got[:, 1:], want[:, 1:], rtol=1e-14)
    np.testing.assert_array_equal(got[:, 0], [1.0, 0.0, 0.0])


@needs_c
def test_pivot_bitwise_parity(rng):
    from veronese._kernels import ckernels
    for trial in range(50):
        m = int(rng.integers(2, 12))
        n = int(rng.integers(2, 12))
        T = rng.normal(size=(m, n))
        prow = int(rng.integers(0, m))
        pcol = int(rng.integers(0, n))
        if abs(T[prow, pcol]) < 1e-3:
            T[prow, pcol] = 1.0 + T[prow, pcol]
        a, b = T.copy(), T.copy()
        pykernels.pivot_update(a, prow, pcol)
        ckernels.pivot_update(b, prow, pcol)
        assert np.array_equal(a, b)  # bit-for-bit, FMA disabled in the build


@needs_c
def test_pivot_parity_along_simplex_like_path(rng):
    # chained pivots drift if any single step differs; run a random pivot walk
    from veronese._kernels import ckernels
    T0 = rng.normal(size=(8, 14))
    a, b = T0.copy(), T0.copy()
    for step in range(30):
        prow = int(rng.integers(0, 8))
        pcol = int(rng.integers(0, 14))
        if abs(a[prow, pcol]) < 1e-6:
            continue
        pykernels.pivot_update(a, prow, pcol)
        ckernels.pivot_update(b, prow, pcol)
        assert np.array_equal(a, b)


def test_multilinear_reference_matches_bruteforce(rng):
    for trial in range(20):
        d = int(rng.integers(2, 4))
        n = int(rng.integers(2, 4))
        K = int(rng.integers(2, 5))
        z = rng.normal(size=(n,) * d)
        V = rng.normal(size=(K, n))
        # oracle: enumerate every vertex tuple directly
        best = -1.0
        for idx in itertools.product(range(K), repeat=d):
            t = z
            for slot in idx:
                t = np.tensordot(t, V[slot], axes=([0], [0]))
            best = max(best, abs(float(t)))
        val, idx = pykernels.multilinear_max(z, V)
        assert val == pytest.approx(best, rel=1e-12)


@needs_c
def test_multilinear_parity(rng):
    from veronese._kernels import ckernels
    for trial in range(60):
        d = int(rng.integers(2, 5))
        n = int(rng.integers(2, 5))
        K = int(rng.integers(2, 9))
        z = rng.normal(size=(n,) * d)
        V = rng.normal(size=(K, n))
        pv, pi = pykernels.multilinear_max(z, V)
        cv, ci = ckernels.multilinear_max(z, V)
        assert pi == ci  # same argmax tuple, same tie-breaking
        assert cv == pytest.approx(pv, rel=1e-12)


def test_backend_env_override():
    # a fresh interpreter honours VERONESE_BACKEND=py
    code = ("import veronese._kernels as k; "
            "print(k.BACKEND, k.HAVE_C)")
    out = subprocess.run([sys.executable, "-c", code],
                         env={"PATH": "/usr/bin:/bin", "VERONESE_BACKEND": "py"},
                         capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["python", "False"]


def test_backend_env_rejects_unknown():
    code = "import veronese._kernels"
    out = subprocess.run([sys.executable, "-c", code],
                         env={"PATH": "/usr/bin:/bin",
                              "VERONESE_BACKEND": "fortran"},
                         capture_output=True, text=True)
    assert out.returncode != 0
    assert "VERONESE_BACKEND" in out.stderr
