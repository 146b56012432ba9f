"""Compressed sparse row storage.

A :class:`CsrMatrix` holds three flat arrays: ``row_ptr`` (length ``rows + 1``),
``col_idx`` and ``values`` (both length ``nnz``). Column indices inside a row are
kept strictly increasing. Dense matrices are plain row-major ``float32`` numpy
arrays.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple

import numpy as np

from .errors import DuplicateEntry, OutOfBounds, ShapeMismatch

INDEX_DTYPE = np.int64
VALUE_DTYPE = np.float32


class Triplet(NamedTuple):
    row: int
    col: int
    value: float


def _frozen(arr, dtype):
    out = np.array(arr, dtype=dtype, copy=True).reshape(-1)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class CsrMatrix:
    """Sparse matrix in CSR form.

    The constructor only coerces dtypes; it does not check the structural
    invariants, so that malformed arrays can still be inspected with
    :func:`validate`. Use :func:`build_csr` or :func:`dense_to_csr` to get a
    matrix that is valid by construction.
    """

    rows: int
    cols: int
    row_ptr: np.ndarray
    col_idx: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rows", int(self.rows))
        object.__setattr__(self, "cols", int(self.cols))
        object.__setattr__(self, "row_ptr", _frozen(self.row_ptr, INDEX_DTYPE))
        object.__setattr__(self, "col_idx", _frozen(self.col_idx, INDEX_DTYPE))
        object.__setattr__(self, "values", _frozen(self.values, VALUE_DTYPE))

    @property
    def nnz(self) -> int:
        return int(self.col_idx.shape[0])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @cached_property
    def is_valid(self) -> bool:
        return not validate(self)

    def row_nnz(self) -> np.ndarray:
        """Nonzero count of every row."""
        return np.diff(self.row_ptr)

    def with_values(self, values) -> "CsrMatrix":
        """Same sparsity pattern, new values."""
        values = np.asarray(values)
        if values.shape != (self.nnz,):
            raise ShapeMismatch(f"expected {self.nnz} values, got shape {values.shape}")
        return CsrMatrix(self.rows, self.cols, self.row_ptr, self.col_idx, values)

    def __eq__(self, other):
        if not isinstance(other, CsrMatrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and np.array_equal(self.row_ptr, other.row_ptr)
            and np.array_equal(self.col_idx, other.col_idx)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None

    def __repr__(self):
        return f"CsrMatrix(rows={self.rows}, cols={self.cols}, nnz={self.nnz})"


def as_dense(x) -> np.ndarray:
    """Coerce ``x`` to a C-contiguous 2-D float32 array."""
    arr = np.ascontiguousarray(x, dtype=VALUE_DTYPE)
    if arr.ndim != 2:
        raise ShapeMismatch(f"dense operand must be 2-D, got {arr.ndim}-D")
    return arr


def build_csr(triplets: Iterable[Triplet], rows: int, cols: int) -> CsrMatrix:
    """Assemble a CSR matrix from ``(row, col, value)`` triplets.

    Triplets may arrive in any order. Duplicate coordinates raise
    :class:`DuplicateEntry` rather than being summed.
    """
    trip = list(triplets)
    r = np.fromiter((t[0] for t in trip), dtype=INDEX_DTYPE, count=len(trip))
    c = np.fromiter((t[1] for t in trip), dtype=INDEX_DTYPE, count=len(trip))
    v = np.fromiter((t[2] for t in trip), dtype=VALUE_DTYPE, count=len(trip))

    bad = (r < 0) | (r >= rows) | (c < 0) | (c >= cols)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise OutOfBounds(
            f"triplet {i} at ({r[i]}, {c[i]}) outside a {rows}x{cols} matrix"
        )

    order = np.lexsort((c, r))
    r, c, v = r[order], c[order], v[order]
    dup = (r[1:] == r[:-1]) & (c[1:] == c[:-1])
    if dup.any():
        i = int(np.flatnonzero(dup)[0])
        raise DuplicateEntry(f"coordinate ({r[i]}, {c[i]}) given more than once")

    row_ptr = np.zeros(rows + 1, dtype=INDEX_DTYPE)
    np.cumsum(np.bincount(r, minlength=rows), out=row_ptr[1:])
    return CsrMatrix(rows, cols, row_ptr, c, v)


def csr_to_dense(a: CsrMatrix) -> np.ndarray:
    out = np.zeros((a.rows, a.cols), dtype=VALUE_DTYPE)
    row_of = np.repeat(np.arange(a.rows, dtype=INDEX_DTYPE), a.row_nnz())
    out[row_of, a.col_idx] = a.values
    return out


def dense_to_csr(d) -> CsrMatrix:
    """Drop exact zeros from a dense matrix; row-major scan keeps columns sorted."""
    d = as_dense(d)
    r, c = np.nonzero(d)
    row_ptr = np.zeros(d.shape[0] + 1, dtype=INDEX_DTYPE)
    np.cumsum(np.bincount(r, minlength=d.shape[0]), out=row_ptr[1:])
    return CsrMatrix(d.shape[0], d.shape[1], row_ptr, c, d[r, c])


def validate(a: CsrMatrix) -> list[str]:
    """List every violated CSR invariant; an empty list means ``a`` is valid."""
    problems = []
    rp, ci = a.row_ptr, a.col_idx
    if a.rows < 0 or a.cols < 0:
        problems.append(f"negative dimensions {a.rows}x{a.cols}")
        return problems
    if rp.shape[0] != a.rows + 1:
        problems.append(f"row_ptr has length {rp.shape[0]}, expected {a.rows + 1}")
        return problems
    if a.values.shape[0] != ci.shape[0]:
        problems.append(
            f"values has length {a.values.shape[0]} but col_idx has length {ci.shape[0]}"
        )
    if rp[0] != 0:
        problems.append(f"row_ptr[0] is {rp[0]}, expected 0")
    if rp[-1] != ci.shape[0]:
        problems.append(f"row_ptr[{a.rows}] is {rp[-1]}, expected nnz={ci.shape[0]}")

    decreasing = np.flatnonzero(np.diff(rp) < 0)
    for i in decreasing:
        problems.append(f"row_ptr not non-decreasing at row {i}")
    if decreasing.size or rp[0] != 0 or rp[-1] != ci.shape[0]:
        # Row slices are meaningless; check column indices without row attribution.
        oob = np.flatnonzero((ci < 0) | (ci >= a.cols))
        for p in oob:
            problems.append(f"column index out of range at position {p}: {ci[p]}")
        return problems

    row_of = np.repeat(np.arange(a.rows), np.diff(rp))
    for p in np.flatnonzero((ci < 0) | (ci >= a.cols)):
        problems.append(
            f"column index out of range at row {row_of[p]} (position {p}): {ci[p]}"
        )
    # Only compare neighbours that share a row.
    same_row = row_of[1:] == row_of[:-1]
    for p in np.flatnonzero(same_row & (ci[1:] <= ci[:-1])):
        problems.append(
            f"column indices not strictly increasing at row {row_of[p]} "
            f"(positions {p}, {p + 1})"
        )
    return problems
