"""File interchange for :class:`~sparsemm.csr.CsrMatrix`.

Two formats are supported:

* Matrix Market coordinate files (``real general``, 1-based indices).
* A raw little-endian dump: ``rows, cols, nnz`` as uint64, then ``row_ptr`` and
  ``col_idx`` as uint64, then ``values`` as float32.
"""
from __future__ import annotations

import os

import numpy as np

from .csr import CsrMatrix, Triplet, build_csr

MM_HEADER = "%%MatrixMarket matrix coordinate real general"

_U64 = np.dtype("<u8")
_F32 = np.dtype("<f4")


def write_matrix_market(a: CsrMatrix, path: str | os.PathLike, comment: str | None = None) -> None:
    rows = np.repeat(np.arange(a.rows), a.row_nnz()) + 1
    cols = a.col_idx + 1
    with open(path, "w", encoding="ascii", newline="\n") as f:
        f.write(MM_HEADER + "\n")
        if comment:
            for line in comment.splitlines():
                f.write(f"% {line}\n")
        f.write(f"{a.rows} {a.cols} {a.nnz}\n")
        # %.9g round-trips any float32 exactly.
        f.writelines(
            f"{r} {c} {v:.9g}\n" for r, c, v in zip(rows.tolist(), cols.tolist(), a.values.tolist())
        )


def read_matrix_market(path: str | os.PathLike) -> CsrMatrix:
    with open(path, "r", encoding="ascii") as f:
        header = f.readline().strip()
        fields = header.lower().split()
        if fields[:4] != ["%%matrixmarket", "matrix", "coordinate", "real"] or fields[4:] != ["general"]:
            raise ValueError(f"{path}: unsupported Matrix Market header {header!r}")
        line = f.readline()
        while line.startswith("%") or not line.strip():
            line = f.readline()
        rows, cols, nnz = (int(t) for t in line.split())
        body = np.loadtxt(f, dtype=np.float64, ndmin=2) if nnz else np.empty((0, 3))
    if body.shape[0] != nnz:
        raise ValueError(f"{path}: header announces {nnz} entries, found {body.shape[0]}")
    trip = (
        Triplet(int(r) - 1, int(c) - 1, v)
        for r, c, v in body.tolist()
    )
    return build_csr(trip, rows, cols)


def write_raw(a: CsrMatrix, path: str | os.PathLike) -> None:
    with open(path, "wb") as f:
        f.write(np.array([a.rows, a.cols, a.nnz], dtype=_U64).tobytes())
        f.write(a.row_ptr.astype(_U64).tobytes())
        f.write(a.col_idx.astype(_U64).tobytes())
        f.write(a.values.astype(_F32).tobytes())


def read_raw(path: str | os.PathLike) -> CsrMatrix:
    buf = open(path, "rb").read()
    if len(buf) < 24:
        raise ValueError(f"{path}: truncated header")
    rows, cols, nnz = (int(x) for x in np.frombuffer(buf, dtype=_U64, count=3))
    expected = 24 + 8 * (rows + 1) + 8 * nnz + 4 * nnz
    if len(buf) != expected:
        raise ValueError(f"{path}: expected {expected} bytes, found {len(buf)}")
    off = 24
    row_ptr = np.frombuffer(buf, dtype=_U64, count=rows + 1, offset=off)
    off += 8 * (rows + 1)
    col_idx = np.frombuffer(buf, dtype=_U64, count=nnz, offset=off)
    off += 8 * nnz
    values = np.frombuffer(buf, dtype=_F32, count=nnz, offset=off)
    return CsrMatrix(rows, cols, row_ptr, col_idx, values)
