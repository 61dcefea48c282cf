"""Tensor powers, symmetrization, cone-point identification, limits."""

import itertools

import numpy as np
import pytest

from veronese.balls import BaseNorm
from veronese.errors import NotCauchy, NotSymmetric
from veronese.norms import projective_norm
from veronese.tensors import (ConePoint, DenseTensor, SymTensor,
                              apply_functionals, cone_sequence_limit,
                              same_cone_point, sym_rep_indices, symmetrize,
                              veronese)
from conftest import rank_one


def test_power_of_basis_vector():
    t = veronese([1.0, 0.0], 2)
    want = np.zeros((2, 2))
    want[0, 0] = 1.0
    np.testing.assert_array_equal(t, want)


def test_power_norm_is_base_norm_power():
    t = veronese([3.0, 4.0], 2)
    b = projective_norm(t, BaseNorm.L2)
    assert b.contains(25.0)  # ||(3,4)||_2^2
    assert b.rel_gap <= 1e-10


def test_power_of_zero_vector():
    np.testing.assert_array_equal(veronese(np.zeros(2), 3), np.zeros((2, 2, 2)))


def test_symmetrize_transposition():
    t = rank_one([np.array([1.0, 0.0]), np.array([0.0, 1.0])])
    want = 0.5 * (t + t.T)
    np.testing.assert_allclose(symmetrize(t), want, atol=1e-15)


def test_symmetrize_idempotent(rng):
    t = rng.normal(size=(3, 3, 3))
    s = symmetrize(t)
    np.testing.assert_allclose(symmetrize(s), s, atol=1e-14)


def test_symmetrize_three_distinct_slots():
    # oracle first: average the 6 hand-enumerated permutations of e1(x)e2(x)e3
    e = np.eye(3)
    t = rank_one([e[0], e[1], e[2]])
    want = np.zeros((3, 3, 3))
    for p in itertools.permutations((0, 1, 2)):
        want[p] += 1.0 / 6.0
    np.testing.assert_allclose(symmetrize(t), want, atol=1e-15)


def test_apply_functionals_basis():
    z = rank_one([np.array([1.0, 0.0])] * 2)
    assert apply_functionals(z, [np.array([1.0, 0.0])] * 2) == pytest.approx(1.0)


def test_apply_functionals_rank_one_evaluation(rng):
    for d in (2, 3):
        x = rng.normal(size=3)
        phi = rng.normal(size=3)
        val = apply_functionals(veronese(x, d), [phi] * d)
        assert val == pytest.approx((phi @ x) ** d, rel=1e-10)


def test_apply_functionals_multilinear_scaling(rng):
    z = rng.normal(size=(2, 2, 2))
    phis = [rng.normal(size=2) for _ in range(3)]
    base = apply_functionals(z, phis)
    scaled = apply_functionals(z, [3.0 * phis[0], phis[1], phis[2]])
    assert scaled == pytest.approx(3.0 * base, rel=1e-12)


def test_identification_even_degree_absorbs_sign():
    assert same_cone_point([1.0, 2.0], [-1.0, -2.0], 2)
    assert not same_cone_point([1.0, 2.0], [-1.0, -2.0], 3)
    assert same_cone_point([0.3, -0.7], [0.3, -0.7], 5)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_identification_matches_tensor_equality(d, rng):
    # predicate vs entrywise tensor agreement on random pairs
    for trial in range(200):
        x = rng.normal(size=3)
        kind = trial % 4
        if kind == 0:
            y = x.copy()
        elif kind == 1:
            y = -x
        elif kind == 2:
            y = x + rng.normal(size=3) * 1e-12
        else:
            y = rng.normal(size=3)
        tensors_equal = np.max(np.abs(veronese(x, d) - veronese(y, d))) <= 1e-8
        assert same_cone_point(x, y, d, tol=1e-9) == tensors_equal


def test_homogeneity_of_powers(rng):
    for d in (1, 2, 3, 4):
        x = rng.normal(size=3)
        lam = rng.normal()
        left = veronese(lam * x, d)
        right = lam ** d * veronese(x, d)
        np.testing.assert_allclose(left, right, rtol=1e-12, atol=1e-14)


def test_limit_of_alternating_signs_even_degree():
    xs = [((-1.0) ** k) * np.array([1.0, 0.0]) for k in range(6)]
    res = cone_sequence_limit(xs, 2, tol=1e-9)
    np.testing.assert_allclose(np.abs(res.limit), [1.0, 0.0], atol=1e-12)
    # sign-aligned subsequence really converges in R^2
    aligned = [s * xs[i] for i, s in zip(res.indices, res.signs)]
    assert max(np.linalg.norm(a - aligned[-1]) for a in aligned) <= 1e-9


def test_limit_of_vanishing_sequence():
    xs = [np.array([1.0 / k, 0.0]) for k in range(40, 46)]
    res = cone_sequence_limit(xs, 3, tol=1e-2)
    np.testing.assert_allclose(res.limit, [0.0, 0.0], atol=1e-12)


def test_alternating_basis_vectors_are_not_cauchy():
    # oracle first: the coefficient l1 distance between the two tensor powers
    # lower-bounds every later pair, so no tail can settle
    gap = float(np.sum(np.abs(veronese([1.0, 0.0], 2) - veronese([0.0, 1.0], 2))))
    assert gap == pytest.approx(2.0)
    xs = [np.array([1.0, 0.0]), np.array([0.0, 1.0])] * 3
    with pytest.raises(NotCauchy):
        cone_sequence_limit(xs, 2, tol=0.5 * gap)


def test_dense_tensor_wrappers():
    t = DenseTensor(np.zeros((2, 2)))
    assert t.order == 2 and t.dim == 2
    with pytest.raises(NotSymmetric):
        SymTensor(rank_one([np.array([1.0, 0.0]), np.array([0.0, 1.0])]))
    p = ConePoint(np.array([1.0, 2.0]), 2)
    np.testing.assert_allclose(p.realize(), veronese([1.0, 2.0], 2))


def test_symmetric_representative_indexing(rng):
    # reduce/expand round trip preserves symmetric tensors
    from veronese.tensors import sym_expand, sym_reduce
    t = symmetrize(rng.normal(size=(3, 3, 3)))
    reps, mults = sym_rep_indices(3, 3)
    assert int(np.sum(mults)) == 27  # permutation counts cover every entry
    back = sym_expand(sym_reduce(t, reps), reps, 3, 3)
    np.testing.assert_allclose(back, t, atol=1e-14)
