"""Norm statistics, spectral-norm estimation and matrix carriers."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from numsparse.core import (
    MatrixProfile,
    SampleConfig,
    SparseMatrix,
    ZeroMatrixWarning,
    matrix_ns,
    numerical_sparsity,
    profile,
    spectral_norm_estimate,
)
from numsparse.hardinstance import build_circulant, build_tail_vector, tail_vector_l1

finite_vectors = st.lists(
    st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False),
    min_size=1, max_size=32,
)


class TestNumericalSparsity:
    def test_all_equal_vector(self):
        assert numerical_sparsity([1, 1, 1, 1]) == pytest.approx(4.0)

    def test_one_sparse(self):
        assert numerical_sparsity([0, 5, 0]) == pytest.approx(1.0)

    def test_three_four(self):
        # direct evaluation (3+4)^2 / (9+16)
        assert numerical_sparsity([3, 4]) == pytest.approx(1.96)

    def test_zero_vector(self):
        assert numerical_sparsity([0.0, 0.0]) == 0.0

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            numerical_sparsity([1.0, np.inf])

    @given(finite_vectors)
    def test_bounded_by_support_size(self, v):
        arr = np.asarray(v)
        if not arr.any():
            return
        ns = numerical_sparsity(arr)
        assert 1.0 - 1e-9 <= ns <= np.count_nonzero(arr) + 1e-9

    @given(finite_vectors, st.floats(min_value=1e-3, max_value=1e3))
    def test_scaling_invariance(self, v, c):
        arr = np.asarray(v)
        if not arr.any():
            return
        assert numerical_sparsity(c * arr) == pytest.approx(numerical_sparsity(arr), rel=1e-9)


class TestMatrixNs:
    def test_identity(self):
        assert matrix_ns(np.eye(4)) == pytest.approx(1.0)

    def test_all_ones(self):
        assert matrix_ns(np.ones((3, 3))) == pytest.approx(3.0)

    def test_dense_row_dominates(self):
        # One dense row in an otherwise identity-like matrix: the max must
        # match a plain per-vector scan.
        rng = np.random.default_rng(7)
        a = np.eye(8)
        a[3] = rng.uniform(0.5, 1.0, size=8)
        scan = max(
            max(numerical_sparsity(a[i]) for i in range(8)),
            max(numerical_sparsity(a[:, j]) for j in range(8)),
        )
        assert matrix_ns(a) == pytest.approx(scan, rel=1e-12)
        assert matrix_ns(a) == pytest.approx(numerical_sparsity(a[3]), rel=1e-12)

    def test_zero_matrix_warns(self):
        with pytest.warns(ZeroMatrixWarning):
            assert matrix_ns(np.zeros((3, 3))) == 0.0

    def test_transpose_invariance(self):
        rng = np.random.default_rng(11)
        a = rng.standard_normal((6, 9))
        assert matrix_ns(a) == pytest.approx(matrix_ns(a.T), rel=1e-12)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(12)
        a = rng.standard_normal((7, 7))
        pr = rng.permutation(7)
        pc = rng.permutation(7)
        assert matrix_ns(a[pr][:, pc]) == pytest.approx(matrix_ns(a), rel=1e-12)

    def test_sparse_matches_dense(self):
        rng = np.random.default_rng(13)
        a = rng.standard_normal((6, 6))
        a[a < 0.3] = 0.0
        if not a.any():
            a[0, 0] = 1.0
        assert matrix_ns(SparseMatrix.from_dense(a)) == pytest.approx(matrix_ns(a), rel=1e-12)


class TestSpectralNormEstimate:
    def test_diagonal(self):
        a = np.diag([1.0, 2.0, 3.0])
        assert spectral_norm_estimate(a, tol=1e-6, seed=1) == pytest.approx(3.0, abs=3e-6)

    def test_identity(self):
        assert spectral_norm_estimate(np.eye(5), seed=2) == pytest.approx(1.0, rel=1e-9)

    def test_hard_instance_circulant(self):
        a = build_tail_vector(8, 0.5)
        c = build_circulant(a)
        # nonnegative circulant: spectral norm is the generator's l1 norm
        assert spectral_norm_estimate(c, tol=1e-10, seed=3) == pytest.approx(
            tail_vector_l1(8, 0.5), rel=1e-6
        )

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(5)
        a = rng.standard_normal((10, 10))
        assert spectral_norm_estimate(a, seed=9) == spectral_norm_estimate(a, seed=9)

    @pytest.mark.parametrize("n", [8, 16, 64])
    def test_psd_matches_dense_oracle(self, n):
        rng = np.random.default_rng(n)
        b = rng.standard_normal((n, n))
        a = b @ b.T  # symmetric PSD
        oracle = float(np.linalg.eigvalsh(a)[-1])
        est = spectral_norm_estimate(a, tol=1e-9, seed=n)
        assert est == pytest.approx(oracle, rel=1e-6)

    def test_never_exceeds_true_norm(self):
        rng = np.random.default_rng(17)
        a = rng.standard_normal((12, 5))
        true = float(np.linalg.norm(a, 2))
        assert spectral_norm_estimate(a, seed=17) <= true * (1 + 1e-12)

    def test_bad_tol(self):
        with pytest.raises(ValueError):
            spectral_norm_estimate(np.eye(2), tol=2.0)


class TestProfile:
    def test_identity_4(self):
        p = profile(np.eye(4), seed=0)
        assert p.frob == pytest.approx(2.0)
        assert p.sigma == pytest.approx(1.0, rel=1e-9)
        assert p.sr == pytest.approx(4.0, rel=1e-6)
        assert p.ns == pytest.approx(1.0)
        assert p.rsp == 1 and p.csp == 1
        assert p.nnz == 4

    def test_all_ones_3(self):
        p = profile(np.ones((3, 3)), seed=0)
        assert p.frob == pytest.approx(3.0)
        assert p.sigma == pytest.approx(3.0, rel=1e-9)
        assert p.sr == pytest.approx(1.0, rel=1e-6)
        assert p.ns == pytest.approx(3.0)

    def test_random_fields_match_dense_oracle(self):
        rng = np.random.default_rng(10)
        a = rng.standard_normal((10, 10))
        p = profile(a, tol=1e-10, seed=10)
        evals = np.linalg.eigvalsh(a.T @ a)
        np.testing.assert_allclose(p.row_l1, np.abs(a).sum(axis=1))
        np.testing.assert_allclose(p.col_l2, np.sqrt((a * a).sum(axis=0)))
        assert p.frob == pytest.approx(np.linalg.norm(a), rel=1e-12)
        assert p.sigma == pytest.approx(np.sqrt(evals[-1]), rel=1e-6)
        assert p.sr == pytest.approx(evals.sum() / evals[-1], rel=1e-5)

    def test_frob_consistency_invariant(self):
        rng = np.random.default_rng(21)
        a = rng.standard_normal((9, 5))
        p = profile(a, seed=21)
        assert p.frob**2 == pytest.approx(float((p.row_l2**2).sum()), rel=1e-9)
        assert 1.0 - 1e-6 <= p.sr <= min(9, 5) + 1e-6

    def test_zero_matrix_flagged(self):
        with pytest.warns(ZeroMatrixWarning):
            p = profile(np.zeros((2, 3)))
        assert p.zero and p.ns == 0.0 and np.isnan(p.sr)


class TestSparseMatrix:
    def test_round_trip_dense(self):
        rng = np.random.default_rng(3)
        a = rng.standard_normal((5, 4))
        a[np.abs(a) < 0.5] = 0.0
        s = SparseMatrix.from_dense(a)
        np.testing.assert_array_equal(s.to_dense(), a)
        assert s.nnz == np.count_nonzero(a)

    def test_duplicate_rejected(self):
        with pytest.raises(ValueError, match="duplicate"):
            SparseMatrix(2, 2, [0, 0], [1, 1], [1.0, 2.0])

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError, match="out of range"):
            SparseMatrix(2, 2, [2], [0], [1.0])

    def test_zero_value_rejected(self):
        with pytest.raises(ValueError, match="zero"):
            SparseMatrix(2, 2, [0], [0], [0.0])

    def test_matvec_agrees_with_dense(self):
        rng = np.random.default_rng(4)
        a = rng.standard_normal((6, 3))
        a[np.abs(a) < 0.4] = 0.0
        s = SparseMatrix.from_dense(a)
        x = rng.standard_normal(3)
        y = rng.standard_normal(6)
        np.testing.assert_allclose(s.matvec(x), a @ x, rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(s.rmatvec(y), a.T @ y, rtol=1e-12, atol=1e-12)

    def test_transpose(self):
        s = SparseMatrix(2, 3, [0, 1], [2, 0], [5.0, -1.0])
        np.testing.assert_array_equal(s.transpose().to_dense(), s.to_dense().T)


class TestSampleConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            SampleConfig(eps=0.0)
        with pytest.raises(ValueError):
            SampleConfig(eps=0.5, c_over=-1.0)
        cfg = SampleConfig(eps=0.5, seed=7, budget_override=100)
        assert cfg.budget_override == 100
