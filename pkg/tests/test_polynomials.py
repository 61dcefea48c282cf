"""Homogeneous polynomial maps and their cone-restriction Lipschitz constants."""

from math import factorial

import numpy as np
import pytest

from veronese.balls import BaseNorm
from veronese.cone import ConeMetricSpace
from veronese.errors import DimensionMismatch, NotSymmetric
from veronese.norms import NormSelector
from veronese.polynomials import (HomPoly, VOperator, apply_operator,
                                  cone_lipschitz_constant, eval_poly,
                                  factorization_check, poly_norm)
from veronese.tensors import symmetrize, veronese
from conftest import rank_one


def _product_poly():
    A = np.zeros((1, 2, 2))
    A[0, 0, 1] = A[0, 1, 0] = 0.5  # P(x) = x1 x2
    return HomPoly(A)


def _square_poly():
    A = np.zeros((1, 2, 2))
    A[0, 0, 0] = 1.0  # P(x) = x1^2
    return HomPoly(A)


def test_eval_product_monomial():
    assert eval_poly(_product_poly(), [2.0, 3.0])[0] == pytest.approx(6.0)


def test_eval_square_monomial():
    assert eval_poly(_square_poly(), [-2.0, 5.0])[0] == pytest.approx(4.0)


def test_eval_at_zero(rng):
    P = HomPoly.random(3, 3, 2, seed=1)
    np.testing.assert_allclose(eval_poly(P, np.zeros(3)), np.zeros(2),
                               atol=1e-15)


def test_homogeneity(rng):
    P = HomPoly.random(3, 3, 2, seed=2)
    x = rng.normal(size=3)
    lam = rng.normal()
    np.testing.assert_allclose(eval_poly(P, lam * x),
                               lam ** 3 * eval_poly(P, x), rtol=1e-10)


def test_asymmetric_coefficients_rejected():
    A = rank_one([np.array([1.0, 0.0]), np.array([0.0, 1.0])])[None]
    with pytest.raises(NotSymmetric):
        HomPoly(A)


def test_operator_agrees_on_powers(rng):
    P = HomPoly.random(2, 2, 2, seed=3)
    x = rng.normal(size=2)
    np.testing.assert_allclose(apply_operator(P, veronese(x, 2)),
                               eval_poly(P, x), rtol=1e-10)


def test_operator_linearity(rng):
    P = HomPoly.random(2, 2, 1, seed=4)
    u = veronese(rng.normal(size=2), 2)
    v = veronese(rng.normal(size=2), 2)
    left = apply_operator(P, u + v)
    right = apply_operator(P, u) + apply_operator(P, v)
    np.testing.assert_allclose(left, right, rtol=1e-10)
    np.testing.assert_allclose(apply_operator(P, 0.0 * u), [0.0], atol=1e-15)


def test_voperator_wraps_restriction(rng):
    P = HomPoly.random(2, 2, 1, seed=5)
    op = VOperator(P)
    x = rng.normal(size=2)
    np.testing.assert_allclose(op(veronese(x, 2)), eval_poly(P, x), rtol=1e-10)


def test_poly_norm_product_monomial():
    # oracle first: dense grid for sup |x1 x2| on the disk
    th = np.linspace(0.0, 2.0 * np.pi, 100_001)
    oracle = float(np.max(np.abs(np.cos(th) * np.sin(th))))
    b = poly_norm(_product_poly(), BaseNorm.L2)
    assert b.contains(oracle, tol=1e-6)


def test_poly_norm_pure_power():
    for base in (BaseNorm.L1, BaseNorm.L2, BaseNorm.LINF):
        b = poly_norm(_square_poly(), base)
        assert b.contains(1.0, tol=1e-6)


def test_poly_norm_zero():
    assert poly_norm(HomPoly(np.zeros((1, 2, 2))), BaseNorm.L2).upper == 0.0


def test_lipschitz_square_sym_metric():
    sp = ConeMetricSpace(2, 2, BaseNorm.L2, NormSelector.SYM_PROJECTIVE)
    b = cone_lipschitz_constant(_square_poly(), sp)
    assert b.contains(1.0, tol=1e-6)
    assert b.rel_gap <= 2e-2


def test_lipschitz_product_sym_metric():
    sp = ConeMetricSpace(2, 2, BaseNorm.L2, NormSelector.SYM_PROJECTIVE)
    b = cone_lipschitz_constant(_product_poly(), sp)
    assert b.contains(0.5, tol=1e-6)
    assert b.rel_gap <= 2e-2


def test_lipschitz_linear_case_is_operator_norm(rng):
    # oracle: top singular value; at d=1 the cone metric is the base metric
    M = rng.normal(size=(2, 3))
    oracle = float(np.linalg.svd(M, compute_uv=False)[0])
    P = HomPoly(M)
    sp = ConeMetricSpace(3, 1, BaseNorm.L2, NormSelector.SYM_PROJECTIVE)
    b = cone_lipschitz_constant(P, sp)
    assert b.contains(oracle, tol=1e-6)


def test_lipschitz_cross_norm_band(rng):
    # under the cross norms only the band inequality is certified
    P = HomPoly.random(2, 2, 1, seed=6)
    pn = poly_norm(P, BaseNorm.L2, strict=False)
    for sel in (NormSelector.INJECTIVE, NormSelector.PROJECTIVE):
        sp = ConeMetricSpace(2, 2, BaseNorm.L2, sel)
        b = cone_lipschitz_constant(P, sp)
        band = 2.0 ** (2 - 1) * 2 ** 2 / factorial(2)
        assert b.lower >= pn.lower * (1 - 1e-6) - 1e-12
        assert b.upper <= band * pn.upper * (1 + 1e-9)


def test_lipschitz_dimension_guard():
    sp = ConeMetricSpace(3, 2, BaseNorm.L2, NormSelector.SYM_PROJECTIVE)
    with pytest.raises(DimensionMismatch):
        cone_lipschitz_constant(_square_poly(), sp)


def test_factorization_identity(rng):
    P = HomPoly.random(3, 3, 2, seed=7)
    rep = factorization_check(P, samples=100, seed=8)
    assert rep.passed
    assert rep.max_residual <= 1e-10


def test_factorization_degree_one(rng):
    P = HomPoly(rng.normal(size=(2, 3)))
    rep = factorization_check(P, samples=50, seed=9)
    assert rep.passed


def test_isometry_small_batch():
    # restriction to the cone keeps the polynomial norm under the symmetric
    # projective metric; a light version of the acceptance batch
    for seed in range(5):
        P = HomPoly.random(2, 2, 1, seed=seed)
        pn = poly_norm(P, BaseNorm.L2, strict=False)
        sp = ConeMetricSpace(2, 2, BaseNorm.L2, NormSelector.SYM_PROJECTIVE)
        lip = cone_lipschitz_constant(P, sp)
        assert lip.lower <= pn.upper * (1 + 2e-2) + 1e-12
        assert pn.lower <= lip.upper * (1 + 2e-2) + 1e-12
