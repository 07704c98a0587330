"""Hard-instance family: tail vector, circulant, Hadamard lift, probe."""

import math

import numpy as np
import pytest

from numsparse.core import matrix_ns, numerical_sparsity, spectral_norm_estimate
from numsparse.hardinstance import (
    build_circulant,
    build_hard_matrix,
    build_tail_vector,
    hadamard,
    sparsity_necessity_probe,
    tail_norm,
    tail_vector_l1,
)


class TestTailVector:
    def test_m2_single_block(self):
        for alpha in (0.1, 0.5, 0.9):
            a = build_tail_vector(2, alpha)
            np.testing.assert_array_equal(a, [1.0, 0.0])
            assert tail_vector_l1(2, alpha) == pytest.approx(1.0)

    def test_m8_alpha_half(self):
        a = build_tail_vector(8, 0.5)
        expected = [1, 2**-1.5, 2**-1.5, 2**-3, 2**-3, 2**-3, 2**-3, 0]
        np.testing.assert_allclose(a, expected, rtol=1e-15)

    @pytest.mark.parametrize("m", [2, 4, 16, 256, 1024])
    @pytest.mark.parametrize("alpha", [0.15, 0.4, 0.75])
    def test_l1_closed_form(self, m, alpha):
        a = build_tail_vector(m, alpha)
        assert a.sum() == pytest.approx(tail_vector_l1(m, alpha), rel=1e-12)

    def test_ns_scales_like_inverse_alpha_squared(self):
        m = 2**10
        for alpha in (0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8):
            ratio = numerical_sparsity(build_tail_vector(m, alpha)) * alpha**2
            assert 0.2 <= ratio <= 5.0

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            build_tail_vector(6, 0.5)
        with pytest.raises(ValueError):
            build_tail_vector(8, 1.5)
        with pytest.raises(ValueError):
            build_tail_vector(1, 0.5)


class TestTailNorm:
    def test_c_zero_is_l2(self):
        a = build_tail_vector(16, 0.4)
        assert tail_norm(a, 0) == pytest.approx(np.linalg.norm(a))

    def test_c_full_is_zero(self):
        a = build_tail_vector(16, 0.4)
        assert tail_norm(a, a.size) == 0.0

    def test_monotone_nonincreasing(self):
        rng = np.random.default_rng(5)
        v = rng.standard_normal(40)
        vals = [tail_norm(v, c) for c in range(41)]
        assert all(x >= y - 1e-15 for x, y in zip(vals, vals[1:]))

    def test_tie_break_low_index_first(self):
        v = np.array([1.0, -1.0, 0.5])
        # removing one entry drops index 0, not index 1
        assert tail_norm(v, 1) == pytest.approx(math.sqrt(1.0 + 0.25))

    def test_decay_lower_bound(self):
        # the truncated geometric series under the tail pins the constant
        m, alpha = 2**10, 0.5
        a = build_tail_vector(m, alpha)
        for c in (2, 4, 8, 16, 32, 64, 128, 256):
            series = sum(
                2.0**i * 2.0 ** (-2 * (1 + alpha) * i)
                for i in range(int(math.log2(c)) + 1, int(math.log2(m)))
            )
            t2 = tail_norm(a, c) ** 2
            assert t2 >= series - 1e-15
            assert t2 >= 0.05 * c ** (-(1 + 2 * alpha))

    def test_c_out_of_range(self):
        with pytest.raises(ValueError):
            tail_norm([1.0], 2)


class TestCirculant:
    def test_two_by_two_shift(self):
        c = build_circulant([1.0, 0.0])
        np.testing.assert_array_equal(c, np.eye(2))

    def test_row_and_column_sums_equal_l1(self):
        a = build_tail_vector(16, 0.5)
        c = build_circulant(a)
        np.testing.assert_allclose(c.sum(axis=1), a.sum(), rtol=1e-12)
        np.testing.assert_allclose(c.sum(axis=0), a.sum(), rtol=1e-12)
        np.testing.assert_allclose(np.abs(c).sum(axis=0), np.abs(c).sum(axis=1))

    def test_power_method_matches_closed_form(self):
        a = build_tail_vector(16, 0.5)
        c = build_circulant(a)
        sigma = spectral_norm_estimate(c, tol=1e-10, seed=1)
        assert sigma == pytest.approx(tail_vector_l1(16, 0.5), rel=1e-6)

    def test_dense_oracle_matches_closed_form(self):
        a = build_tail_vector(32, 0.3)
        assert np.linalg.norm(build_circulant(a), 2) == pytest.approx(
            tail_vector_l1(32, 0.3), rel=1e-10
        )


class TestHadamard:
    def test_order_one(self):
        np.testing.assert_array_equal(hadamard(1), [[1]])

    def test_order_two(self):
        np.testing.assert_array_equal(hadamard(2), [[1, 1], [1, -1]])

    @pytest.mark.parametrize("k", [1, 2, 4, 8, 16])
    def test_gram_identity_exact(self, k):
        h = hadamard(k)
        assert h.dtype == np.int64
        np.testing.assert_array_equal(h @ h.T, k * np.eye(k, dtype=np.int64))

    def test_singular_values(self):
        sv = np.linalg.svd(hadamard(8).astype(float), compute_uv=False)
        np.testing.assert_allclose(sv, math.sqrt(8), rtol=1e-12)

    def test_not_power_of_two(self):
        with pytest.raises(ValueError):
            hadamard(6)


class TestHardMatrix:
    def test_k1_is_circulant(self):
        inst = build_hard_matrix(8, 1, 0.5)
        np.testing.assert_array_equal(inst.aprime, build_circulant(inst.a))

    def test_spectral_norm_of_lift(self):
        inst = build_hard_matrix(8, 2, 0.5)
        sigma = np.linalg.norm(inst.aprime, 2)
        assert sigma == pytest.approx(math.sqrt(2) * tail_vector_l1(4, 0.5), rel=1e-10)
        assert inst.sigma == pytest.approx(sigma, rel=1e-10)

    @pytest.mark.parametrize("n,k", [(16, 2), (32, 4), (64, 8), (128, 4)])
    def test_kronecker_spectral_identity(self, n, k):
        inst = build_hard_matrix(n, k, 0.45)
        base = np.linalg.norm(build_circulant(inst.a), 2)
        lifted = np.linalg.norm(inst.aprime, 2)
        assert lifted == pytest.approx(math.sqrt(k) * base, rel=1e-8)

    @pytest.mark.parametrize("n,k,alpha", [(16, 2, 0.5), (32, 4, 0.3), (64, 4, 0.6)])
    def test_ns_scales_with_k(self, n, k, alpha):
        inst = build_hard_matrix(n, k, alpha)
        ratio = matrix_ns(inst.aprime) / (k * numerical_sparsity(inst.a))
        assert 0.5 <= ratio <= 2.0

    def test_divisibility_errors(self):
        with pytest.raises(ValueError, match="at least 2"):
            build_hard_matrix(4, 4, 0.5)
        with pytest.raises(ValueError, match="power of 2"):
            build_hard_matrix(12, 2, 0.5)


class TestSparsityProbe:
    def test_full_sparsity_bound_zero(self):
        inst = build_hard_matrix(16, 2, 0.5)
        rep = sparsity_necessity_probe(inst, 0.25, [inst.n])
        assert rep.bounds == (0.0,)
        assert rep.s_star == inst.n

    def test_zero_sparsity_bound_maximal(self):
        inst = build_hard_matrix(16, 2, 0.5)
        rep = sparsity_necessity_probe(inst, 0.25, [0, 4, inst.n])
        row_l2 = np.linalg.norm(inst.aprime[0])
        assert rep.bounds[0] == pytest.approx(row_l2 / inst.sigma, rel=1e-12)
        assert rep.bounds[0] == max(rep.bounds)

    def test_bounds_match_bruteforce(self):
        inst = build_hard_matrix(32, 4, 0.4)
        grid = [0, 1, 3, 7, 15, 31]
        rep = sparsity_necessity_probe(inst, 0.3, grid)
        row = np.sort(np.abs(inst.aprime[0]))[::-1]
        for s, b in zip(rep.s_grid, rep.bounds):
            brute = math.sqrt(float((row[s:] ** 2).sum())) / inst.sigma
            assert b == pytest.approx(brute, rel=1e-12, abs=1e-15)

    def test_threshold_in_lower_bound_regime(self):
        # alpha tied to eps as in the lower-bound construction: the flagged
        # threshold lands within a factor 4 of k * eps^-2 / log2(1/eps)^2.
        eps = 0.1
        n, k = 128, 4
        alpha = 1.0 / math.log2(1.0 / eps)
        inst = build_hard_matrix(n, k, alpha)
        rep = sparsity_necessity_probe(inst, eps, range(n + 1))
        target = k / (eps**2 * math.log2(1.0 / eps) ** 2)
        assert rep.s_star is not None
        assert target / 4 <= rep.s_star <= target * 4
