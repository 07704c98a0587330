"""Entrywise sampling schemes that approximate a matrix in spectral norm.

Two samplers are provided. The hybrid sampler keeps each nonzero entry
independently with probability proportional to the best of three l1-based
distributions (global mass, row-weighted, column-weighted) and rescales
kept entries to stay unbiased; its expected output size is governed by a
budget that grows with numerical sparsity and stable rank. The l1 row
sampler draws a fixed number of entries per row with replacement, giving a
hard per-row sparsity bound at the cost of a larger total. Both reduce to
the vector estimator :func:`sparsify_vector_l1` on a single row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .core import (
    MatrixProfile,
    SampleConfig,
    SparseMatrix,
    as_dense,
    as_vector,
    numerical_sparsity,
    profile,
    shape_of,
)


def budget_terms(ns: float, sr: float, n: float, log_m: float, eps: float) -> tuple[float, float]:
    """The two summands of the sample budget, before the oversampling constant.

    ``n`` is the smaller dimension and ``log_m`` the natural log of the
    larger one.
    """
    bernstein = ns * sr * log_m / eps**2
    linear = math.sqrt(ns * sr * n) * log_m / eps
    return bernstein, linear


@dataclass(frozen=True)
class SampleBudget:
    """Target expected sample count for the hybrid sampler."""

    s: float
    term_bernstein: float
    term_linear: float
    overridden: bool = False


def budget(prof: MatrixProfile, cfg: SampleConfig) -> SampleBudget:
    """Sample budget for ``prof`` under ``cfg``.

    s = c_over * (eps^-2 * ns * sr * ln m  +  eps^-1 * sqrt(ns * sr * n) * ln m)
    with m the larger and n the smaller dimension. ``budget_override``
    bypasses the formula but the terms are still reported.
    """
    if prof.zero or prof.ns == 0.0:
        raise ValueError("cannot budget an all-zero matrix")
    log_m = math.log(prof.max_dim)
    tb, tl = budget_terms(prof.ns, prof.sr, prof.min_dim, log_m, cfg.eps)
    if cfg.budget_override is not None:
        return SampleBudget(float(cfg.budget_override), tb, tl, overridden=True)
    return SampleBudget(cfg.c_over * (tb + tl), tb, tl)


@dataclass(frozen=True)
class HybridDistribution:
    """The three entry distributions and their pointwise max, aligned with
    the nonzero coordinates (row, col) in canonical order.

    p1 spreads the global entrywise l1 mass, p2 weights rows by squared row
    l1 norm, p3 does the same for columns. Each sums to one over the
    nonzeros; pstar is their coordinatewise max and vanishes exactly on
    zero entries.
    """

    rows: int
    cols: int
    row: np.ndarray
    col: np.ndarray
    absval: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    p3: np.ndarray
    pstar: np.ndarray

    @classmethod
    def from_matrix(cls, a, prof: MatrixProfile | None = None) -> "HybridDistribution":
        if prof is None:
            prof = profile(a)
        if prof.zero:
            raise ValueError("cannot build sampling distributions for a zero matrix")
        if isinstance(a, SparseMatrix):
            i, j, v = a.row, a.col, a.val
        else:
            arr = as_dense(a)
            i, j = np.nonzero(arr)
            v = arr[i, j]
        absval = np.abs(v)
        row_l1 = prof.row_l1
        col_l1 = prof.col_l1
        sum_row_l1_sq = float(row_l1 @ row_l1)
        sum_col_l1_sq = float(col_l1 @ col_l1)
        p1 = absval / prof.total_l1
        p2 = row_l1[i] * absval / sum_row_l1_sq
        p3 = col_l1[j] * absval / sum_col_l1_sq
        pstar = np.maximum(p1, np.maximum(p2, p3))
        return cls(prof.rows, prof.cols, i, j, absval, p1, p2, p3, pstar)


class HybridSampler:
    """Reusable hybrid sparsifier for one matrix.

    Precomputes the distributions once; :meth:`sample` then draws one
    independent sparsification per seed. Each nonzero entry is kept with
    probability min(1, s * pstar) and divided by that probability, so the
    output is an entrywise unbiased estimator of the input and its expected
    size is at most 3s. The per-entry uniforms come from a single Philox
    substream consumed in canonical entry order, making the result a pure
    function of (seed, entry rank): independent of traversal order or
    thread count.
    """

    def __init__(self, a, prof: MatrixProfile | None = None):
        self.prof = prof if prof is not None else profile(a)
        self.dist = HybridDistribution.from_matrix(a, self.prof)
        if isinstance(a, SparseMatrix):
            self._values = a.val
        else:
            arr = as_dense(a)
            self._values = arr[self.dist.row, self.dist.col]

    def keep_probabilities(self, s: float) -> np.ndarray:
        return np.minimum(1.0, s * self.dist.pstar)

    def expected_nnz(self, s: float) -> float:
        return float(self.keep_probabilities(s).sum())

    def sample(self, s: float, seed: int) -> SparseMatrix:
        p = self.keep_probabilities(s)
        gen = rng.substream(seed, rng.HYBRID_SAMPLER)
        u = gen.random(p.size)
        keep = u < p
        d = self.dist
        return SparseMatrix(
            d.rows, d.cols,
            d.row[keep], d.col[keep],
            self._values[keep] / p[keep],
        )


def sparsify_hybrid(a, cfg: SampleConfig, prof: MatrixProfile | None = None) -> SparseMatrix:
    """One hybrid sparsification of ``a`` at the budget implied by ``cfg``.

    For repeated draws over the same matrix build a :class:`HybridSampler`
    once and vary the seed.
    """
    sampler = HybridSampler(a, prof)
    s = budget(sampler.prof, cfg).s
    return sampler.sample(s, cfg.seed)


def l1_sample_count(ns: float, eps: float, factor: float = 1.0) -> int:
    """Draw count ceil(factor * eps^-2 * ns) used by the l1 estimators."""
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    return max(1, math.ceil(factor * ns / eps**2))


def _l1_vector_estimate(v: np.ndarray, draws: int, gen: np.random.Generator) -> np.ndarray:
    """Average of ``draws`` with-replacement l1 samples of ``v``.

    Each draw picks coordinate i with probability |v_i|/||v||_1 and
    contributes v_i / (p_i * draws); repeated picks accumulate. Counts are
    drawn as one multinomial, which is distributionally identical to the
    sequential scheme and costs O(len(v)) instead of O(draws).
    """
    absval = np.abs(v)
    total = absval.sum()
    out = np.zeros_like(v)
    if total == 0.0:
        return out
    p = absval / total
    counts = gen.multinomial(draws, p)
    hit = counts > 0
    out[hit] = v[hit] * counts[hit] / (p[hit] * draws)
    return out


def sparsify_vector_l1(a, eps: float, seed: int = 0) -> np.ndarray:
    """Unbiased l1-sampled estimate of a vector.

    Uses ceil(eps^-2 * ns(a)) draws, so the output has at most that many
    nonzeros and its expected squared norm is inflated by at most a factor
    (1 + eps^2). The zero vector is returned unchanged.
    """
    v = as_vector(a)
    ns = numerical_sparsity(v)
    if ns == 0.0:
        return np.zeros_like(v)
    draws = l1_sample_count(ns, eps)
    gen = rng.substream(seed, rng.VECTOR_SAMPLER)
    return _l1_vector_estimate(v, draws, gen)


def sparsify_l1_rows(a, s_per_row: int, seed: int = 0) -> SparseMatrix:
    """Row-wise l1 sampling with a hard per-row sparsity cap.

    Every row is estimated independently by ``s_per_row`` with-replacement
    draws from its own l1 distribution (collisions summed), so no output
    row ever has more than ``s_per_row`` nonzeros and the estimate is
    unbiased row by row. Zero rows stay zero. Row substreams are derived
    from (seed, row index), so results do not depend on the order rows are
    processed in.
    """
    if s_per_row < 1:
        raise ValueError(f"s_per_row must be at least 1, got {s_per_row}")
    m, n = shape_of(a)
    dense = a.to_dense() if isinstance(a, SparseMatrix) else as_dense(a)
    out_i: list[np.ndarray] = []
    out_j: list[np.ndarray] = []
    out_v: list[np.ndarray] = []
    for i in range(m):
        row = dense[i]
        if not row.any():
            continue
        gen = rng.substream(seed, rng.L1_ROW_SAMPLER, i)
        est = _l1_vector_estimate(row, s_per_row, gen)
        j = np.nonzero(est)[0]
        out_i.append(np.full(j.size, i, dtype=np.int64))
        out_j.append(j)
        out_v.append(est[j])
    if not out_i:
        return SparseMatrix.empty(m, n)
    return SparseMatrix(
        m, n,
        np.concatenate(out_i),
        np.concatenate(out_j),
        np.concatenate(out_v),
    )


def l1_row_budget(ns: float, m: int, n: int, eps: float, c_l1: float = 1.0) -> int:
    """Per-row draw count ceil(c_l1 * eps^-2 * ns * ln(m + n)) for the row scheme."""
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    if ns <= 0:
        raise ValueError("numerical sparsity must be positive")
    return max(1, math.ceil(c_l1 * ns * math.log(m + n) / eps**2))
