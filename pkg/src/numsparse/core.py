"""Matrix carriers, norm statistics and spectral-norm estimation.

Dense matrices are plain 2-D float64 ``numpy`` arrays (row-major). Sparse
matrices are immutable COO triples in canonical row-major order. All
statistics needed by the samplers (row/column l1 and l2 norms, numerical
sparsity, stable rank, a power-method spectral-norm estimate) are collected
once into a :class:`MatrixProfile`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import rng


class ZeroMatrixWarning(UserWarning):
    """A statistic was requested for an all-zero matrix."""


def as_dense(a) -> np.ndarray:
    """Validate and return ``a`` as a 2-D finite float64 array."""
    if isinstance(a, SparseMatrix):
        return a.to_dense()
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={arr.ndim}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix entries must be finite")
    return arr


def as_vector(v) -> np.ndarray:
    """Validate and return ``v`` as a 1-D finite float64 array."""
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"expected a vector, got ndim={arr.ndim}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector entries must be finite")
    return arr


@dataclass(frozen=True)
class SparseMatrix:
    """Immutable COO matrix with entries sorted row-major and no duplicates.

    Invariants enforced at construction: indices in range, no duplicate
    (i, j) pair, values finite and nonzero.
    """

    rows: int
    cols: int
    row: np.ndarray
    col: np.ndarray
    val: np.ndarray

    def __post_init__(self):
        row = np.ascontiguousarray(self.row, dtype=np.int64)
        col = np.ascontiguousarray(self.col, dtype=np.int64)
        val = np.ascontiguousarray(self.val, dtype=np.float64)
        if not (row.shape == col.shape == val.shape) or row.ndim != 1:
            raise ValueError("row, col and val must be 1-D arrays of equal length")
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        if row.size:
            if row.min() < 0 or row.max() >= self.rows:
                raise ValueError("row index out of range")
            if col.min() < 0 or col.max() >= self.cols:
                raise ValueError("column index out of range")
        if not np.all(np.isfinite(val)):
            raise ValueError("values must be finite")
        if np.any(val == 0.0):
            raise ValueError("explicit zeros are not stored; drop them first")
        order = np.lexsort((col, row))
        row, col, val = row[order], col[order], val[order]
        if row.size > 1:
            same = (np.diff(row) == 0) & (np.diff(col) == 0)
            if np.any(same):
                k = int(np.argmax(same))
                raise ValueError(f"duplicate entry at ({row[k]}, {col[k]})")
        object.__setattr__(self, "row", row)
        object.__setattr__(self, "col", col)
        object.__setattr__(self, "val", val)
        self.row.setflags(write=False)
        self.col.setflags(write=False)
        self.val.setflags(write=False)

    @property
    def nnz(self) -> int:
        return int(self.val.size)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @classmethod
    def from_dense(cls, a) -> "SparseMatrix":
        arr = as_dense(a)
        i, j = np.nonzero(arr)
        return cls(arr.shape[0], arr.shape[1], i, j, arr[i, j])

    @classmethod
    def empty(cls, rows: int, cols: int) -> "SparseMatrix":
        z = np.zeros(0)
        return cls(rows, cols, z, z, z)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols))
        out[self.row, self.col] = self.val
        return out

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.cols, self.rows, self.col, self.row, self.val)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        """Compute ``A @ x``."""
        return np.bincount(self.row, weights=self.val * x[self.col], minlength=self.rows)

    def rmatvec(self, x: np.ndarray) -> np.ndarray:
        """Compute ``A.T @ x``."""
        return np.bincount(self.col, weights=self.val * x[self.row], minlength=self.cols)

    def scaled(self, c: float) -> "SparseMatrix":
        return SparseMatrix(self.rows, self.cols, self.row, self.col, self.val * c)

    def row_nnz(self) -> np.ndarray:
        return np.bincount(self.row, minlength=self.rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and np.array_equal(self.row, other.row)
            and np.array_equal(self.col, other.col)
            and np.array_equal(self.val, other.val)
        )


def matvec(a, x: np.ndarray) -> np.ndarray:
    if isinstance(a, SparseMatrix):
        return a.matvec(x)
    return a @ x


def rmatvec(a, x: np.ndarray) -> np.ndarray:
    if isinstance(a, SparseMatrix):
        return a.rmatvec(x)
    return a.T @ x


def shape_of(a) -> tuple[int, int]:
    if isinstance(a, SparseMatrix):
        return a.shape
    return as_dense(a).shape


def numerical_sparsity(v) -> float:
    """Smooth sparsity of a vector: the squared l1/l2 norm ratio.

    Real-valued so that scaling leaves it unchanged; 0 for the zero vector.
    Always lies in [1, nnz(v)] for nonzero ``v``.
    """
    arr = np.abs(as_vector(v))
    peak = arr.max(initial=0.0)
    if peak == 0.0:
        return 0.0
    arr = arr / peak  # scale-invariant; guards against under/overflow
    l2sq = float(arr @ arr)
    l1 = float(arr.sum())
    return l1 * l1 / l2sq


def _ns_from_norms(l1: np.ndarray, l2: np.ndarray) -> np.ndarray:
    out = np.zeros_like(l1)
    nz = l2 > 0
    out[nz] = (l1[nz] / l2[nz]) ** 2
    return out


def matrix_ns(a) -> float:
    """Max numerical sparsity over all rows and all columns of ``a``.

    Zero rows/columns are skipped; an all-zero matrix yields 0 with a
    :class:`ZeroMatrixWarning` since downstream samplers cannot use it.
    """
    stats = _norm_stats(a)
    if stats.frob == 0.0:
        warnings.warn("numerical sparsity of an all-zero matrix", ZeroMatrixWarning)
        return 0.0
    row_ns = _ns_from_norms(stats.row_l1, stats.row_l2)
    col_ns = _ns_from_norms(stats.col_l1, stats.col_l2)
    return float(max(row_ns.max(), col_ns.max()))


@dataclass(frozen=True)
class _NormStats:
    row_l1: np.ndarray
    row_l2: np.ndarray
    col_l1: np.ndarray
    col_l2: np.ndarray
    frob: float
    rsp: int
    csp: int


def _norm_stats(a) -> _NormStats:
    if isinstance(a, SparseMatrix):
        absval = np.abs(a.val)
        sq = a.val * a.val
        row_l1 = np.bincount(a.row, weights=absval, minlength=a.rows)
        col_l1 = np.bincount(a.col, weights=absval, minlength=a.cols)
        row_sq = np.bincount(a.row, weights=sq, minlength=a.rows)
        col_sq = np.bincount(a.col, weights=sq, minlength=a.cols)
        rsp = int(np.bincount(a.row, minlength=a.rows).max(initial=0))
        csp = int(np.bincount(a.col, minlength=a.cols).max(initial=0))
    else:
        arr = as_dense(a)
        absval = np.abs(arr)
        row_l1 = absval.sum(axis=1)
        col_l1 = absval.sum(axis=0)
        row_sq = (arr * arr).sum(axis=1)
        col_sq = (arr * arr).sum(axis=0)
        rsp = int(np.count_nonzero(arr, axis=1).max(initial=0))
        csp = int(np.count_nonzero(arr, axis=0).max(initial=0))
    return _NormStats(
        row_l1=row_l1,
        row_l2=np.sqrt(row_sq),
        col_l1=col_l1,
        col_l2=np.sqrt(col_sq),
        frob=float(np.sqrt(row_sq.sum())),
        rsp=rsp,
        csp=csp,
    )


def _power_iteration(a, tol: float, max_iter: int, seed: int):
    """Estimate the top singular value of ``a``.

    Iterates v <- A^T(Av) from a seeded start on the unit sphere and monitors
    the relative change of the Rayleigh quotient ||Av||^2. Returns
    (sigma, iterations, converged).
    """
    m, n = shape_of(a)
    gen = rng.substream(seed, rng.POWER_ITERATION)
    v = gen.standard_normal(n)
    nv = np.linalg.norm(v)
    if nv == 0.0:  # pragma: no cover - probability zero
        v = np.ones(n)
        nv = np.sqrt(n)
    v /= nv
    prev = 0.0
    for it in range(1, max_iter + 1):
        w = matvec(a, v)
        rq = float(w @ w)
        if rq == 0.0:
            return 0.0, it, True
        v = rmatvec(a, w)
        v /= np.linalg.norm(v)
        if it > 1 and abs(rq - prev) <= tol * rq:
            return float(np.sqrt(rq)), it, True
        prev = rq
    return float(np.sqrt(prev)), max_iter, False


def spectral_norm_estimate(a, tol: float = 1e-6, max_iter: int = 5000, seed: int = 0) -> float:
    """Power-method estimate of the spectral norm, deterministic given seed.

    The estimate never exceeds the true norm and reaches at least
    (1 - tol) of it with high probability over the start vector. Warns and
    returns the best estimate if ``max_iter`` is exhausted first.
    """
    if not 0.0 < tol < 1.0:
        raise ValueError(f"tol must be in (0, 1), got {tol}")
    sigma, _, converged = _power_iteration(a, tol, max_iter, seed)
    if not converged:
        warnings.warn(
            f"power iteration did not converge in {max_iter} iterations",
            RuntimeWarning,
        )
    return sigma


@dataclass(frozen=True)
class MatrixProfile:
    """Norm statistics of one matrix, computed in a single pass plus a
    power-method pass for the spectral norm."""

    rows: int
    cols: int
    row_l1: np.ndarray
    row_l2: np.ndarray
    col_l1: np.ndarray
    col_l2: np.ndarray
    frob: float
    sigma: float
    ns: float
    sr: float
    rsp: int
    csp: int
    zero: bool = False
    sigma_converged: bool = True
    nnz: int = 0
    total_l1: float = field(default=0.0)

    @property
    def max_dim(self) -> int:
        return max(self.rows, self.cols)

    @property
    def min_dim(self) -> int:
        return min(self.rows, self.cols)


def profile(a, tol: float = 1e-6, seed: int = 0, max_iter: int = 5000) -> MatrixProfile:
    """Collect the :class:`MatrixProfile` of ``a``.

    An all-zero matrix is accepted but flagged (``zero=True``, ``ns=0`` and
    ``sr`` NaN) so samplers can refuse it explicitly.
    """
    m, n = shape_of(a)
    stats = _norm_stats(a)
    if isinstance(a, SparseMatrix):
        nnz = a.nnz
    else:
        nnz = int(np.count_nonzero(as_dense(a)))
    if stats.frob == 0.0:
        warnings.warn("profiling an all-zero matrix", ZeroMatrixWarning)
        return MatrixProfile(
            rows=m, cols=n,
            row_l1=stats.row_l1, row_l2=stats.row_l2,
            col_l1=stats.col_l1, col_l2=stats.col_l2,
            frob=0.0, sigma=0.0, ns=0.0, sr=float("nan"),
            rsp=0, csp=0, zero=True, nnz=0, total_l1=0.0,
        )
    sigma, _, converged = _power_iteration(a, tol, max_iter, seed)
    row_ns = _ns_from_norms(stats.row_l1, stats.row_l2)
    col_ns = _ns_from_norms(stats.col_l1, stats.col_l2)
    ns = float(max(row_ns.max(), col_ns.max()))
    return MatrixProfile(
        rows=m, cols=n,
        row_l1=stats.row_l1, row_l2=stats.row_l2,
        col_l1=stats.col_l1, col_l2=stats.col_l2,
        frob=stats.frob, sigma=sigma, ns=ns,
        sr=stats.frob ** 2 / sigma ** 2,
        rsp=stats.rsp, csp=stats.csp,
        zero=False, sigma_converged=converged,
        nnz=nnz, total_l1=float(stats.row_l1.sum()),
    )


@dataclass(frozen=True)
class SampleConfig:
    """Knobs shared by the samplers: target error, oversampling constant,
    root seed and an optional explicit sample budget."""

    eps: float
    c_over: float = 1.0
    seed: int = 0
    budget_override: float | None = None

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if not self.c_over > 0:
            raise ValueError(f"c_over must be positive, got {self.c_over}")
        if self.budget_override is not None and not self.budget_override > 0:
            raise ValueError("budget_override must be positive when given")
