"""Approximate matrix multiplication from sampled outer products.

The product AB is a sum of n column-row outer products. Sampling a few of
them with probability proportional to the product of their norms gives an
unbiased estimate whose Frobenius error shrinks like 1/sqrt(pairs); feeding
the pair sampler l1-sparsified columns and rows keeps each sampled outer
product cheap. Two compositions are provided: a Frobenius-error pipeline
(per-pair vector estimates, then pair sampling) and a spectral-error
pipeline (row-capped sparsifiers on both factors, then pair sampling at a
spectral-grade count).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .core import SparseMatrix, as_dense, as_vector, numerical_sparsity, shape_of
from .sparsify import (
    _l1_vector_estimate,
    l1_row_budget,
    l1_sample_count,
    sparsify_l1_rows,
)

OUTER_DRAW_FACTOR = 9.0


@dataclass(frozen=True)
class AmmReport:
    """Product estimate plus the sampling effort that produced it."""

    c: np.ndarray
    pairs_sampled: int
    entry_samples: int
    err_metric: str
    err_value: float | None = None


def outer_product_estimate(a, b, eps: float, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Sparse unbiased estimates (a', b') whose outer product approximates ab^T.

    Each vector is l1-sampled with 9 * eps^-2 * ns draws from its own
    substream, so E[a' b'^T] = a b^T and the expected squared Frobenius
    error is at most eps^2 ||a||^2 ||b||^2. Zero vectors pass through.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must be in (0, 1), got {eps}")
    va, vb = as_vector(a), as_vector(b)
    out = []
    for tag, v in ((rng.OUTER_PRODUCT_A, va), (rng.OUTER_PRODUCT_B, vb)):
        ns = numerical_sparsity(v)
        if ns == 0.0:
            out.append(np.zeros_like(v))
            continue
        draws = l1_sample_count(ns, eps, factor=OUTER_DRAW_FACTOR)
        out.append(_l1_vector_estimate(v, draws, rng.substream(seed, tag)))
    return out[0], out[1]


def sample_outer_products(a, b, c: int, seed: int = 0) -> np.ndarray:
    """Unbiased estimate of AB from ``c`` outer products sampled with
    probability proportional to column-norm times row-norm.

    Pairs with a zero product norm contribute nothing and are never drawn;
    if every pair is zero the exact product (zero) is returned.
    """
    A = as_dense(a)
    B = as_dense(b)
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"inner dimensions differ: {A.shape} x {B.shape}")
    if c < 1:
        raise ValueError(f"pair count must be at least 1, got {c}")
    weights = np.linalg.norm(A, axis=0) * np.linalg.norm(B, axis=1)
    total = weights.sum()
    if total == 0.0:
        return np.zeros((A.shape[0], B.shape[1]))
    p = weights / total
    counts = rng.substream(seed, rng.PAIR_SAMPLER).multinomial(c, p)
    sel = np.nonzero(counts)[0]
    scale = counts[sel] / (c * p[sel])
    return (A[:, sel] * scale) @ B[sel, :]


def amm_frobenius(a, b, eps: float, seed: int = 0) -> AmmReport:
    """Approximate AB with expected Frobenius error eps ||A||_F ||B||_F.

    Every column of A and matching row of B is l1-estimated at eps/3, and
    the pair sampler runs on the estimates with ceil((eps/3)^-2) pairs; the
    two stages contribute eps/3-grade errors that compose below eps.
    """
    if not 0.0 < eps <= 0.5:
        raise ValueError(f"eps must be in (0, 1/2], got {eps}")
    A = as_dense(a)
    B = as_dense(b)
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"inner dimensions differ: {A.shape} x {B.shape}")
    n = A.shape[1]
    stage_eps = eps / 3.0
    a_hat = np.zeros_like(A)
    b_hat = np.zeros_like(B)
    entry_samples = 0
    for i in range(n):
        for tag, src, dst in (
            (rng.AMM_SKETCH_A, A[:, i], a_hat[:, i]),
            (rng.AMM_SKETCH_B, B[i, :], b_hat[i, :]),
        ):
            ns = numerical_sparsity(src)
            if ns == 0.0:
                continue
            draws = l1_sample_count(ns, stage_eps, factor=OUTER_DRAW_FACTOR)
            entry_samples += draws
            dst[:] = _l1_vector_estimate(src, draws, rng.substream(seed, tag, i))
    pairs = max(1, math.ceil(stage_eps**-2))
    c = sample_outer_products(a_hat, b_hat, pairs, seed)
    return AmmReport(c=c, pairs_sampled=pairs, entry_samples=entry_samples,
                     err_metric="frobenius")


def spectral_pair_count(eps: float, sr_a: float, sr_b: float, m: int, p: int,
                        c_mz: float = 1.0) -> int:
    """Pair budget for spectral-error pair sampling:
    ceil(c_mz * eps^-2 * sqrt(sr_a sr_b) * ln(eps^-1 sr_a sr_b (m + p)))."""
    arg = max(math.e, sr_a * sr_b * (m + p) / eps)
    return max(1, math.ceil(c_mz * math.sqrt(sr_a * sr_b) * math.log(arg) / eps**2))


def amm_spectral(a, b, eps: float, sigma_a: float | None = None,
                 sigma_b: float | None = None, seed: int = 0,
                 c_mz: float = 1.0, c_l1: float = 1.0) -> AmmReport:
    """Approximate AB with spectral error eps ||A||_2 ||B||_2, w.h.p.

    Both factors are first replaced by l1 sparsifiers at eps/4 (columns of A
    capped via the row scheme on the transpose, rows of B directly), then
    the pair sampler runs at eps/4 with a spectral-grade pair count. The
    three error terms (dropped mass of A, of B, and pair-sampling noise)
    each stay near eps/4 of the product norm, so their sum stays below eps.

    ``sigma_a``/``sigma_b`` are constant-factor spectral-norm estimates used
    only to size the pair budget; they default to power-method estimates of
    the sketches.
    """
    if not 0.0 < eps <= 0.5:
        raise ValueError(f"eps must be in (0, 1/2], got {eps}")
    if sigma_a is not None and not sigma_a > 0:
        raise ValueError(f"sigma_a must be positive, got {sigma_a}")
    if sigma_b is not None and not sigma_b > 0:
        raise ValueError(f"sigma_b must be positive, got {sigma_b}")
    m, n = shape_of(a)
    n2, p = shape_of(b)
    if n != n2:
        raise ValueError(f"inner dimensions differ: {(m, n)} x {(n2, p)}")
    stage_eps = eps / 4.0
    A = a.to_dense() if isinstance(a, SparseMatrix) else as_dense(a)
    B = b.to_dense() if isinstance(b, SparseMatrix) else as_dense(b)

    s_a = l1_row_budget(_matrix_ns_nonzero(A), m, n, stage_eps, c_l1)
    s_b = l1_row_budget(_matrix_ns_nonzero(B), n, p, stage_eps, c_l1)
    a_sketch = sparsify_l1_rows(A.T, s_a, _subseed(seed, rng.AMM_SKETCH_A)).transpose()
    b_sketch = sparsify_l1_rows(B, s_b, _subseed(seed, rng.AMM_SKETCH_B))
    entry_samples = s_a * n + s_b * n

    a_dense = a_sketch.to_dense()
    b_dense = b_sketch.to_dense()
    sr_a = _stable_rank(a_dense, sigma_a, seed)
    sr_b = _stable_rank(b_dense, sigma_b, seed)
    pairs = spectral_pair_count(stage_eps, sr_a, sr_b, m, p, c_mz)
    c = sample_outer_products(a_dense, b_dense, pairs, seed)
    return AmmReport(c=c, pairs_sampled=pairs, entry_samples=entry_samples,
                     err_metric="spectral")


def _matrix_ns_nonzero(arr: np.ndarray) -> float:
    from .core import matrix_ns

    ns = matrix_ns(arr)
    if ns == 0.0:
        raise ValueError("cannot sparsify an all-zero factor")
    return ns


def _stable_rank(arr: np.ndarray, sigma: float | None, seed: int) -> float:
    from .core import spectral_norm_estimate

    frob_sq = float((arr * arr).sum())
    if frob_sq == 0.0:
        return 1.0
    if sigma is None:
        sigma = spectral_norm_estimate(arr, tol=1e-6, seed=seed)
    return max(1.0, frob_sq / sigma**2)


def _subseed(seed: int, tag: int) -> int:
    # Distinct 64-bit root per pipeline stage; the stage substreams inside
    # the samplers then split further per row/draw.
    return (int(seed) ^ (tag * 0x9E3779B97F4A7C15)) & ((1 << 64) - 1)
