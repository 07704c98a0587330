"""Worst-case family for entrywise sparsification.

The family starts from a geometric tail vector (blocks of length 2^i with
value 2^-(1+alpha)i), whose circulant matrix has spectral norm equal to the
vector's l1 norm while every row keeps a heavy l2 tail. A Kronecker lift by
a Hadamard matrix raises the numerical sparsity by a factor k without
collapsing the rank. Any matrix that approximates this family in spectral
norm must keep many entries in every row, which the probe below quantifies
per row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import as_vector


def _check_power_of_two(value: int, name: str) -> None:
    if value < 1 or value & (value - 1):
        raise ValueError(f"{name} must be a power of 2, got {value}")


def tail_vector_l1(m: int, alpha: float) -> float:
    """Closed form of the l1 norm of :func:`build_tail_vector`:
    (1 - 2^(-alpha log2 m)) / (1 - 2^(-alpha))."""
    return (1.0 - 2.0 ** (-alpha * math.log2(m))) / (1.0 - 2.0 ** (-alpha))


def build_tail_vector(m: int, alpha: float) -> np.ndarray:
    """Geometric tail vector of length m (m a power of 2, alpha in (0, 1)).

    Entry j (1-based) equals 2^-(1+alpha) floor(log2 j); the last entry is 0.
    The tail-decay guarantees sharpen when alpha exceeds 1/log2(m), but the
    construction itself is valid for any alpha in (0, 1).
    """
    _check_power_of_two(m, "m")
    if m < 2:
        raise ValueError(f"m must be at least 2, got {m}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    j = np.arange(1, m)
    a = np.empty(m)
    a[:-1] = 2.0 ** (-(1.0 + alpha) * np.floor(np.log2(j)))
    a[-1] = 0.0
    return a


def tail_norm(a, c: int) -> float:
    """l2 norm of ``a`` after removing its ``c`` largest-magnitude entries.

    Ties break toward the lower index, so for a nonincreasing vector the
    removed set is simply the prefix.
    """
    v = as_vector(a)
    if not 0 <= c <= v.size:
        raise ValueError(f"c must be in [0, {v.size}], got {c}")
    order = np.argsort(-np.abs(v), kind="stable")
    rest = v[order[c:]]
    return float(np.linalg.norm(rest))


def build_circulant(a) -> np.ndarray:
    """Circulant matrix whose j-th row is ``a`` cyclically shifted by j.

    For nonnegative ``a`` the spectral norm equals the l1 norm of ``a``
    (the DFT coefficient at frequency zero dominates).
    """
    v = as_vector(a)
    m = v.size
    out = np.empty((m, m))
    for j in range(m):
        out[j] = np.roll(v, j)
    return out


def hadamard(k: int) -> np.ndarray:
    """Sylvester Hadamard matrix of order k (power of 2), integer entries.

    Satisfies H @ H.T = k*I exactly; all singular values are sqrt(k).
    """
    _check_power_of_two(k, "k")
    return scipy.linalg.hadamard(k, dtype=np.int64)


@dataclass(frozen=True)
class HardInstance:
    """A lifted hard instance: circulant(a) Kronecker a Hadamard block."""

    m: int
    k: int
    alpha: float
    a: np.ndarray
    aprime: np.ndarray

    @property
    def n(self) -> int:
        return self.m * self.k

    @property
    def sigma(self) -> float:
        """Exact spectral norm sqrt(k) * ||a||_1."""
        return math.sqrt(self.k) * tail_vector_l1(self.m, self.alpha)


def build_hard_matrix(n: int, k: int, alpha: float) -> HardInstance:
    """Build the n x n hard instance with Hadamard order k.

    Requires n and k to be powers of 2 with k dividing n and n/k >= 2. The
    lift multiplies the spectral norm by exactly sqrt(k) and the numerical
    sparsity of every row/column by exactly k.
    """
    _check_power_of_two(n, "n")
    _check_power_of_two(k, "k")
    if n % k != 0:
        raise ValueError(f"k must divide n, got n={n}, k={k}")
    m = n // k
    if m < 2:
        raise ValueError(f"n/k must be at least 2, got n={n}, k={k} (m={m})")
    a = build_tail_vector(m, alpha)
    aprime = np.kron(build_circulant(a), hadamard(k).astype(np.float64))
    return HardInstance(m=m, k=k, alpha=alpha, a=a, aprime=aprime)


@dataclass(frozen=True)
class SparsityProbeReport:
    """Per-row achievable-error lower bounds over a grid of sparsity caps."""

    eps: float
    s_grid: tuple[int, ...]
    bounds: tuple[float, ...]
    s_star: int | None


def sparsity_necessity_probe(inst: HardInstance, eps: float, s_grid) -> SparsityProbeReport:
    """Lower-bound the relative spectral error of any row-s-sparse approximation.

    Keeping the s largest entries of a row is the best any approximation can
    do for that row, and the spectral error of the whole matrix is at least
    the l2 norm of what one row discards. The report lists that bound,
    normalized by the exact spectral norm, for each s in the grid, plus the
    smallest grid value whose bound drops to eps or below (None if the bound
    stays above eps everywhere).
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    grid = sorted(int(s) for s in s_grid)
    if grid and not 0 <= grid[0] <= grid[-1] <= inst.n:
        raise ValueError(f"s values must lie in [0, {inst.n}]")
    row = inst.aprime[0]
    sigma = inst.sigma
    bounds = tuple(tail_norm(row, s) / sigma for s in grid)
    s_star = None
    for s, b in zip(grid, bounds):
        if b <= eps:
            s_star = s
            break
    return SparsityProbeReport(eps=eps, s_grid=tuple(grid), bounds=bounds, s_star=s_star)
