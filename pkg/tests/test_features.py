import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shrimp.baselines import additive_kernel_matrix
from shrimp.errors import ParameterError
from shrimp.features import (
    build_bank,
    design,
    feature_columns,
    gram_expectation_error,
    load_bank,
    restrict,
    save_bank,
    sparse_bank,
)
from shrimp.sampling import make_rng, plan_subsets


def test_q1_bank_one_nonzero_per_row():
    bank = sparse_bank(5, 1, 10, make_rng(0), 1.0)
    assert bank.W.shape == (10, 5)
    assert (np.count_nonzero(bank.W, axis=1) == 1).all()


def test_dense_bank_when_q_equals_d():
    bank = sparse_bank(10, 10, 100, make_rng(0), 0.1)
    assert (np.count_nonzero(bank.W, axis=1) == 10).all()
    assert np.array_equal(bank.supports, np.tile(np.arange(10), (100, 1)))


def test_bank_variance():
    bank = sparse_bank(4, 2, 100_000, make_rng(3), 0.5)
    assert 0.49 <= bank.nonzero_values().var() <= 0.51


def test_default_variance_is_inverse_order():
    assert sparse_bank(6, 3, 30, make_rng(0)).sigma2 == pytest.approx(1 / 3)


def test_bank_rejects_nonpositive_variance():
    with pytest.raises(ParameterError):
        build_bank(plan_subsets(3, 1, 3), -1.0, make_rng(0))


def test_design_at_origin():
    bank = sparse_bank(3, 2, 6, make_rng(0))
    A = design(bank, np.zeros((4, 3))).A
    assert np.all(A[:, :6] == 1.0) and np.all(A[:, 6:] == 0.0)


def test_quarter_period():
    bank = sparse_bank(1, 1, 1, make_rng(0))
    x = np.array([[math.pi / 2 / bank.W[0, 0]]])
    A = design(bank, x).A
    assert A[0, 0] == pytest.approx(0.0, abs=1e-15) and A[0, 1] == pytest.approx(1.0)


def test_design_matches_scalar_loop():
    rng = make_rng(11)
    bank = sparse_bank(3, 2, 4, rng)
    X = rng.uniform(-1, 1, (3, 3))
    A = design(bank, X).A
    for i in range(3):
        for j in range(4):
            z = sum(X[i, k] * bank.W[j, k] for k in range(3))
            assert abs(A[i, j] - math.cos(z)) <= 1e-15
            assert abs(A[i, 4 + j] - math.sin(z)) <= 1e-15


def test_design_is_pure():
    bank = sparse_bank(4, 2, 12, make_rng(1))
    X = make_rng(2).uniform(size=(5, 4))
    assert np.array_equal(design(bank, X).A, design(bank, X).A)


def test_design_rejects_wrong_width():
    with pytest.raises(ParameterError):
        design(sparse_bank(3, 1, 3, make_rng(0)), np.zeros((2, 4)))


def test_restrict_cases():
    bank = sparse_bank(2, 1, 2, make_rng(0))
    dm = design(bank, make_rng(1).uniform(size=(3, 2)))
    assert np.array_equal(restrict(dm, dm.columns).A, dm.A)
    one = restrict(dm, [0])
    assert one.A.shape == (3, 1) and np.array_equal(one.A[:, 0], dm.A[:, 0])
    nested = restrict(restrict(dm, [0, 2, 3]), [2, 3])
    assert np.array_equal(nested.A, restrict(dm, [2, 3]).A)
    with pytest.raises(ParameterError):
        restrict(restrict(dm, [0, 1]), [2])


def test_feature_columns_match_design():
    bank = sparse_bank(5, 2, 20, make_rng(4))
    X = make_rng(5).uniform(-1, 1, (7, 5))
    cols = np.array([0, 3, 21, 39])
    assert np.allclose(feature_columns(bank, X, cols), design(bank, X).A[:, cols], atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32), m=st.integers(1, 8), d=st.integers(1, 6), N=st.integers(1, 40))
def test_pythagorean_row_sums(seed, m, d, N):
    rng = make_rng(seed)
    q = int(rng.integers(1, d + 1))
    bank = sparse_bank(d, q, N, rng)
    A = design(bank, rng.uniform(-3, 3, (m, d))).A
    assert np.allclose((A**2).sum(axis=1), N, atol=1e-12 * N)


def test_gram_error_single_point_is_zero():
    err = gram_expectation_error(np.array([[0.3, -0.2, 0.9]]), 2, [1, 5], make_rng(0))
    assert np.allclose(err, 0.0, atol=1e-14)


def test_equal_samples_kernel_and_gram_are_one():
    X = np.array([[0.1, 0.2, 0.3], [0.1, 0.2, 0.3]])
    K = additive_kernel_matrix(X, X, 3, sigma2=1 / 3, normalize=True)
    assert np.allclose(K, 1.0)
    bank = sparse_bank(3, 3, 50, make_rng(0), 1 / 3)
    A = design(bank, X).A
    assert (A @ A.T / 50)[0, 1] == pytest.approx(1.0)


def test_gram_error_decreases_with_more_features():
    X = make_rng(0).uniform(-1, 1, (20, 4))
    curves = np.array([gram_expectation_error(X, 2, [2, 20, 200], make_rng(s)) for s in range(5)])
    med = np.median(curves, axis=0)
    assert med[-1] < med[0]


def test_bank_roundtrip(tmp_path):
    bank = sparse_bank(6, 3, 25, make_rng(9), 0.7)
    save_bank(bank, tmp_path / "b.bin")
    back = load_bank(tmp_path / "b.bin")
    assert np.array_equal(back.W, bank.W) and np.array_equal(back.supports, bank.supports)
    assert back.q == 3 and back.sigma2 == 0.7
