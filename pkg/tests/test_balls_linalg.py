"""Unit-ball vertex sets, norming functionals, and the SVD helpers."""

import numpy as np
import pytest

from veronese.balls import (BaseNorm, ball_vertices, base_sphere_grid,
                            norming_functional, unit_sphere_grid, vector_norm)
from veronese.errors import DimensionTooLarge, UnsupportedNorm
from veronese.linalg import (nuclear_norm, power_iteration, singular_values,
                             spectral_norm)


def test_l1_ball_vertices_r2():
    V = ball_vertices(BaseNorm.L1, 2)
    assert V.shape == (4, 2)  # +-e1, +-e2
    want = {(1, 0), (-1, 0), (0, 1), (0, -1)}
    assert {tuple(np.round(v).astype(int)) for v in V} == want


def test_linf_ball_vertex_counts():
    assert ball_vertices(BaseNorm.LINF, 2).shape == (4, 2)
    assert ball_vertices(BaseNorm.LINF, 3).shape == (8, 3)


@pytest.mark.parametrize("base", [BaseNorm.L1, BaseNorm.LINF])
@pytest.mark.parametrize("n", [2, 3, 4])
def test_vertices_unit_norm_and_distinct(base, n):
    V = ball_vertices(base, n)
    for v in V:
        assert abs(vector_norm(v, base) - 1.0) <= 1e-12
    gaps = np.linalg.norm(V[:, None, :] - V[None, :, :], axis=-1)
    gaps += 10.0 * np.eye(len(V))
    assert float(gaps.min()) > 1e-9


def test_euclidean_ball_has_no_vertices():
    with pytest.raises(UnsupportedNorm):
        ball_vertices(BaseNorm.L2, 2)


def test_linf_vertex_count_guard():
    with pytest.raises(DimensionTooLarge):
        ball_vertices(BaseNorm.LINF, 15)


def test_norming_functional_duality(rng):
    # phi pairs to ||x|| and sits in the dual unit ball
    for base in (BaseNorm.L1, BaseNorm.L2, BaseNorm.LINF):
        for trial in range(20):
            x = rng.normal(size=3)
            phi = norming_functional(x, base)
            assert abs(phi @ x - vector_norm(x, base)) <= 1e-12
            assert vector_norm(phi, base.dual()) <= 1.0 + 1e-12


def test_sphere_grids_are_unit(rng):
    for n in (2, 3, 4):
        G = unit_sphere_grid(n, 64, seed=3)
        np.testing.assert_allclose(np.linalg.norm(G, axis=1), 1.0, atol=1e-12)
    for base in (BaseNorm.L1, BaseNorm.L2, BaseNorm.LINF):
        G = base_sphere_grid(base, 3, 32, seed=5)
        for g in G:
            assert abs(vector_norm(g, base) - 1.0) <= 1e-10


def test_singular_values_of_diagonal():
    s = singular_values(np.diag([3.0, 1.0]))
    np.testing.assert_allclose(s, [3.0, 1.0], atol=1e-12)


def test_singular_values_of_zero():
    s = singular_values(np.zeros((2, 2)))
    np.testing.assert_allclose(s, [0.0, 0.0], atol=1e-15)


def test_singular_values_signature_matrix():
    # oracle first: sqrt of the eigenvalues of A^T A
    A = np.array([[1.0, 0.0], [0.0, -1.0]])
    oracle = np.sqrt(np.sort(np.linalg.eigvalsh(A.T @ A))[::-1])
    np.testing.assert_allclose(oracle, [1.0, 1.0], atol=1e-12)
    np.testing.assert_allclose(singular_values(A), oracle, atol=1e-12)


def test_spectral_and_nuclear_norms(rng):
    for trial in range(10):
        A = rng.normal(size=(3, 3))
        s = np.sqrt(np.maximum(np.linalg.eigvalsh(A.T @ A), 0.0))
        assert abs(spectral_norm(A) - s.max()) <= 1e-10 * (1 + s.max())
        assert abs(nuclear_norm(A) - s.sum()) <= 1e-10 * (1 + s.sum())


def test_power_iteration_matches_svd(rng):
    for trial in range(10):
        A = rng.normal(size=(4, 3))
        top = power_iteration(A, seed=trial)
        assert abs(top - singular_values(A)[0]) <= 1e-8
