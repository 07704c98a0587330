"""MatrixMarket coordinate I/O.

Only the "coordinate real general" flavor is supported; the banner must be
exactly ``%%MatrixMarket matrix coordinate real general``. File indices are
1-based per the format, internal indices 0-based. The reader rejects
duplicate coordinates and out-of-range indices with the offending line
number, which ``scipy.io.mmread`` would silently accept or obscure; writing
emits entries in canonical (row, col) order with shortest round-trip float
formatting, so load/save is an exact fixed point on canonical files.
"""

from __future__ import annotations

import math

import numpy as np

from .core import SparseMatrix

HEADER = "%%MatrixMarket matrix coordinate real general"


class MatrixMarketError(ValueError):
    """Malformed MatrixMarket input; the message names the line number."""


def load_matrix_market(path) -> SparseMatrix:
    """Read a coordinate-real-general MatrixMarket file into a SparseMatrix.

    Explicit zero values are dropped (the sparse carrier stores only true
    nonzeros); everything else is validated strictly.
    """
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].rstrip() != HEADER:
        raise MatrixMarketError(f"{path}:1: header must be exactly {HEADER!r}")
    k = 1
    while k < len(lines) and (lines[k].startswith("%") or not lines[k].strip()):
        k += 1
    if k == len(lines):
        raise MatrixMarketError(f"{path}:{k}: missing size line")
    parts = lines[k].split()
    if len(parts) != 3:
        raise MatrixMarketError(f"{path}:{k + 1}: size line must be 'rows cols nnz'")
    try:
        rows, cols, nnz = (int(p) for p in parts)
    except ValueError as exc:
        raise MatrixMarketError(f"{path}:{k + 1}: size line must be integers") from exc
    if rows < 0 or cols < 0 or nnz < 0:
        raise MatrixMarketError(f"{path}:{k + 1}: negative size")

    ri = np.empty(nnz, dtype=np.int64)
    ci = np.empty(nnz, dtype=np.int64)
    vv = np.empty(nnz, dtype=np.float64)
    seen: set[tuple[int, int]] = set()
    count = 0
    lineno = k + 1
    for raw in lines[k + 1:]:
        lineno += 1
        if not raw.strip() or raw.startswith("%"):
            continue
        fields = raw.split()
        if len(fields) != 3:
            raise MatrixMarketError(f"{path}:{lineno}: entry line must be 'i j value'")
        try:
            i, j, v = int(fields[0]), int(fields[1]), float(fields[2])
        except ValueError as exc:
            raise MatrixMarketError(f"{path}:{lineno}: cannot parse entry") from exc
        if not (1 <= i <= rows and 1 <= j <= cols):
            raise MatrixMarketError(f"{path}:{lineno}: index ({i}, {j}) out of range")
        if not math.isfinite(v):
            raise MatrixMarketError(f"{path}:{lineno}: non-finite value")
        if (i, j) in seen:
            raise MatrixMarketError(f"{path}:{lineno}: duplicate entry ({i}, {j})")
        seen.add((i, j))
        if count >= nnz:
            raise MatrixMarketError(f"{path}:{lineno}: more entries than declared ({nnz})")
        ri[count], ci[count], vv[count] = i - 1, j - 1, v
        count += 1
    if count != nnz:
        raise MatrixMarketError(f"{path}:{lineno}: expected {nnz} entries, found {count}")
    keep = vv[:count] != 0.0
    return SparseMatrix(rows, cols, ri[:count][keep], ci[:count][keep], vv[:count][keep])


def save_matrix_market(m: SparseMatrix, path) -> None:
    """Write ``m`` in coordinate-real-general form, entries sorted by (i, j)."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(HEADER + "\n")
        fh.write(f"{m.rows} {m.cols} {m.nnz}\n")
        for i, j, v in zip(m.row, m.col, m.val):
            fh.write(f"{i + 1} {j + 1} {float(v)!r}\n")


def load_vector(path) -> np.ndarray:
    """Read a vector stored one real per line (blank/% lines skipped)."""
    values = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, start=1):
            s = raw.strip()
            if not s or s.startswith("%"):
                continue
            try:
                v = float(s)
            except ValueError as exc:
                raise MatrixMarketError(f"{path}:{lineno}: cannot parse value") from exc
            if not math.isfinite(v):
                raise MatrixMarketError(f"{path}:{lineno}: non-finite value")
            values.append(v)
    return np.asarray(values, dtype=np.float64)


def save_vector(v, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        for x in np.asarray(v, dtype=np.float64):
            fh.write(f"{float(x)!r}\n")
