"""Injective/projective/symmetric-projective norm brackets vs exact oracles."""

import itertools

import numpy as np
import pytest

from veronese.balls import BaseNorm, ball_vertices
from veronese.bracket import EXACT_TAGS
from veronese.config import DEFAULTS
from veronese.errors import NotSymmetric
from veronese.norms import (NormSelector, injective_norm, projective_norm,
                            sandwich_check, sym_projective_norm, tensor_norm)
from veronese.tensors import symmetrize, veronese
from conftest import BASES, norm_product, rank_one


# ---------------------------------------------------------------- injective

def test_injective_signature_matrix_euclidean():
    # oracle first: spectral norm of diag(1,-1) from the eigenvalues of A^T A
    z = np.diag([1.0, -1.0])
    oracle = float(np.sqrt(np.max(np.linalg.eigvalsh(z.T @ z))))
    assert oracle == pytest.approx(1.0)
    b = injective_norm(z, BaseNorm.L2)
    assert b.contains(oracle) and b.rel_gap <= 1e-10


def test_injective_on_powers_is_norm_power(rng):
    for base in BASES:
        for d in (2, 3):
            x = rng.normal(size=3)
            b = injective_norm(veronese(x, d), base)
            assert b.contains(norm_product([x] * d, base), tol=1e-9)


def test_injective_offdiagonal_sup_vertex_oracle():
    z = np.zeros((2, 2))
    z[0, 1] = z[1, 0] = 1.0
    # oracle first: the sup-norm dual ball is the l1 cross-polytope; the
    # bilinear sup is attained on vertex pairs, enumerate all 16
    V = ball_vertices(BaseNorm.L1, 2)
    oracle = max(abs(a @ z @ b) for a in V for b in V)
    assert oracle == pytest.approx(1.0)
    b = injective_norm(z, BaseNorm.LINF)
    assert b.contains(oracle) and b.rel_gap <= 1e-10


# --------------------------------------------------------------- projective

def test_projective_l1_is_coefficient_mass():
    z = np.array([[1.0, -2.0], [0.0, 3.0]])
    oracle = float(np.sum(np.abs(z)))  # 6
    b = projective_norm(z, BaseNorm.L1)
    assert b.exact and b.contains(oracle, tol=1e-10)


def test_projective_nuclear_euclidean():
    z = np.diag([1.0, -1.0])
    oracle = float(np.sum(np.sqrt(np.maximum(
        np.linalg.eigvalsh(z.T @ z), 0.0))))
    assert oracle == pytest.approx(2.0)
    b = projective_norm(z, BaseNorm.L2)
    assert b.exact and b.contains(oracle, tol=1e-10)


def test_projective_on_powers_matches_injective(rng):
    for base in BASES:
        x = rng.normal(size=2)
        t = veronese(x, 3)
        want = norm_product([x] * 3, base)
        assert projective_norm(t, base).contains(want, tol=1e-8)
        assert injective_norm(t, base).contains(want, tol=1e-8)


def test_projective_linf_small_lp_route(rng):
    # d=2, n=2: vertex-product dictionary is exact within the LP tolerance
    z = rng.normal(size=(2, 2))
    b = projective_norm(z, BaseNorm.LINF)
    assert b.lower <= b.upper
    # scaling homogeneity
    b3 = projective_norm(3.0 * z, BaseNorm.LINF)
    assert b3.upper <= 3.0 * b.upper * (1 + 1e-9) + 1e-12
    assert b3.lower >= 3.0 * b.lower * (1 - 1e-9) - 1e-12


# ---------------------------------------------------- symmetric projective

def test_sym_projective_on_powers(rng):
    for base in BASES:
        x = rng.normal(size=2)
        res = sym_projective_norm(veronese(x, 2), base, strict=False)
        assert res.bracket.contains(norm_product([x] * 2, base), tol=1e-8)


def test_sym_projective_two_power_difference():
    u = veronese([1.0, 0.0], 2) - veronese([0.0, 1.0], 2)
    # oracle: the 2-atom split costs 2; the dual polynomial x1^2 - x2^2 has
    # sup 1 on the Euclidean disk and pairs to 2, so both bounds meet at 2
    res = sym_projective_norm(u, BaseNorm.L2)
    assert res.bracket.contains(2.0, tol=1e-9)
    assert res.bracket.rel_gap <= 1e-9


def test_sym_projective_zero():
    res = sym_projective_norm(np.zeros((2, 2)), BaseNorm.L2)
    assert res.bracket.upper == 0.0


def test_sym_projective_rejects_asymmetric():
    with pytest.raises(NotSymmetric):
        sym_projective_norm(rank_one([np.array([1.0, 0.0]),
                                      np.array([0.0, 1.0])]), BaseNorm.L2)


def test_sym_projective_decomposition_reconstructs(rng):
    u = symmetrize(rng.normal(size=(2, 2)))
    res = sym_projective_norm(u, BaseNorm.L2)
    np.testing.assert_allclose(res.decomposition.reconstruct(), u, atol=1e-9)
    # decomposition cost certifies the upper bound
    assert res.decomposition.cost(BaseNorm.L2) <= res.bracket.upper + 1e-9


def test_sym_projective_dominates_projective(rng):
    # restriction inequality: s-pi is an infimum over fewer decompositions
    for trial in range(5):
        u = symmetrize(rng.normal(size=(2, 2, 2)))
        pi = projective_norm(u, BaseNorm.L1)
        res = sym_projective_norm(u, BaseNorm.L1, strict=False)
        assert res.bracket.upper >= pi.lower - 1e-9


def test_dictionary_refinement_is_monotone(rng):
    # a larger atom dictionary can only improve the LP upper bound
    u = symmetrize(rng.normal(size=(3, 3)))
    coarse = sym_projective_norm(u, BaseNorm.LINF, strict=False,
                                 settings=DEFAULTS.with_(atom_budget=32,
                                                         atom_cap=32))
    fine = sym_projective_norm(u, BaseNorm.LINF, strict=False,
                               settings=DEFAULTS.with_(atom_budget=32,
                                                       atom_cap=512))
    assert fine.bracket.upper <= coarse.bracket.upper * (1 + 1e-9) + 1e-12
    assert fine.bracket.lower >= coarse.bracket.lower * (1 - 1e-9) - 1e-12


# ------------------------------------------------------------ sandwich etc.

def test_sandwich_on_elementary_tensor(rng):
    xs = [rng.normal(size=2) for _ in range(2)]
    rep = sandwich_check(rank_one(xs), BaseNorm.L2)
    want = norm_product(xs, BaseNorm.L2)
    assert rep.consistent
    assert rep.injective.contains(want, tol=1e-8)
    assert rep.projective.contains(want, tol=1e-8)


def test_sandwich_strict_gap_pair():
    z = np.zeros((2, 2))
    z[0, 1] = z[1, 0] = 1.0
    # oracle: spectral 1 vs nuclear 2 for the swap matrix
    s = np.sqrt(np.maximum(np.linalg.eigvalsh(z.T @ z), 0.0))
    assert float(s.max()) == pytest.approx(1.0)
    assert float(s.sum()) == pytest.approx(2.0)
    rep = sandwich_check(z, BaseNorm.L2)
    assert rep.consistent
    assert rep.injective.contains(1.0, tol=1e-9)
    assert rep.projective.contains(2.0, tol=1e-9)


def test_sandwich_random_order3_l1(rng):
    for trial in range(10):
        z = rng.normal(size=(2, 2, 2))
        rep = sandwich_check(z, BaseNorm.L1)
        assert rep.consistent
        assert rep.projective.exact  # coefficient-mass oracle
        assert rep.injective.lower <= rep.projective.upper + 1e-12


def test_tensor_norm_dispatch(rng):
    u = veronese(rng.normal(size=2), 2)
    for sel in NormSelector:
        b = tensor_norm(u, sel, BaseNorm.L2)
        assert b.lower <= b.upper


def test_absolute_homogeneity(rng):
    z = rng.normal(size=(2, 2))
    for base in BASES:
        for fn in (injective_norm, projective_norm):
            b1 = fn(z, base)
            b2 = fn(-2.5 * z, base)
            assert b2.upper <= 2.5 * b1.upper * (1 + 1e-9) + 1e-12
            assert b2.lower >= 2.5 * b1.lower * (1 - 1e-9) - 1e-12
