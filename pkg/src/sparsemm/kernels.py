"""SDDMM, SpMM and FusedMM over CSR.

Each operation has two implementations:

* ``*_reference``: the per-row scalar algorithm, single-threaded, one
  multiply-add at a time.
* the chunked kernel (``sddmm``, ``spmm``, ``fusedmm``): rows are processed in
  parallel; a row's nonzeros are walked in chunks of ``vlc`` column indices,
  and each nonzero touches a whole ``n``-wide row of the dense operand at once.
  SDDMM can additionally split a row across ``nt`` cooperating tasks.

Operands and results are float32. Products are formed and summed in float64
(a float32 product is exact there), so the only rounding left is the final
store; the fused kernel also rounds its sampled intermediate to float32, exactly
as a separate SDDMM would.

Chunked results are a pure function of the inputs and ``(vlc, nt)``. Each task
writes a disjoint slice of the output, so the worker count never changes a bit
of the result.
"""
from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass

import numba
import numpy as np
from numba import njit, prange

from .csr import VALUE_DTYPE, CsrMatrix, as_dense
from .errors import InvalidConfig, InvalidMatrix, ShapeMismatch

VLC_CHOICES = (8, 16, 32, 64)
NT_CHOICES = (1, 2, 4, 8, 16)
DEFAULT_VLC = 32

# Work-items needed to fill one stack of the target GPU; the NT heuristic is
# defined against this capacity.
OCCUPANCY_WORK_ITEMS = 4096


@dataclass(frozen=True)
class KernelConfig:
    vlc: int = DEFAULT_VLC
    nt: int = 1
    workers: int = 0  # 0 = every available thread
    prefetch: bool = False

    def __post_init__(self):
        if self.vlc not in VLC_CHOICES:
            raise InvalidConfig(f"vlc must be one of {VLC_CHOICES}, got {self.vlc}")
        if self.nt not in NT_CHOICES:
            raise InvalidConfig(f"nt must be one of {NT_CHOICES}, got {self.nt}")
        if self.workers < 0:
            raise InvalidConfig(f"workers must be >= 0, got {self.workers}")


def occupancy(m: int, nt: int) -> float:
    """Fraction of the device filled when ``m * nt`` work-items are launched."""
    if m < 1 or nt < 1:
        raise ValueError("m and nt must be positive")
    items = m * nt
    waves = -(-items // OCCUPANCY_WORK_ITEMS)
    return items / (waves * OCCUPANCY_WORK_ITEMS)


def select_nt(m: int) -> int:
    """Smallest NT in {1, 2, 4, 8, 16} that maximises :func:`occupancy`."""
    best, best_occ = 1, occupancy(m, 1)
    for nt in NT_CHOICES[1:]:
        occ = occupancy(m, nt)
        if occ > best_occ:
            best, best_occ = nt, occ
    return best


def max_workers() -> int:
    return numba.config.NUMBA_NUM_THREADS


@contextmanager
def _workers(n: int):
    prev = numba.get_num_threads()
    numba.set_num_threads(min(n, max_workers()) if n > 0 else max_workers())
    try:
        yield
    finally:
        numba.set_num_threads(prev)


# ---------------------------------------------------------------------------
# argument checks

def _check_pattern(a: CsrMatrix):
    if not a.is_valid:
        raise InvalidMatrix("sparse operand violates CSR invariants; see csr.validate")


def _sddmm_operands(pattern, c, b):
    _check_pattern(pattern)
    c, b = as_dense(c), as_dense(b)
    if c.shape[0] != pattern.rows:
        raise ShapeMismatch(f"C has {c.shape[0]} rows, pattern has {pattern.rows}")
    if b.shape[0] != pattern.cols:
        raise ShapeMismatch(f"B has {b.shape[0]} rows, pattern has {pattern.cols} columns")
    if c.shape[1] != b.shape[1]:
        raise ShapeMismatch(f"C has {c.shape[1]} columns, B has {b.shape[1]}")
    return c, b


def _spmm_operands(a, b):
    _check_pattern(a)
    b = as_dense(b)
    if b.shape[0] != a.cols:
        raise ShapeMismatch(f"B has {b.shape[0]} rows, A has {a.cols} columns")
    return b


def _fused_operands(pattern, c, b, d):
    c, b = _sddmm_operands(pattern, c, b)
    d = as_dense(d)
    if d.shape != (pattern.cols, c.shape[1]):
        raise ShapeMismatch(f"D must be {(pattern.cols, c.shape[1])}, got {d.shape}")
    return c, b, d


# ---------------------------------------------------------------------------
# scalar reference kernels

@njit(cache=True)
def _sddmm_ref(ia, ja, c, b, out):
    n = c.shape[1]
    for i in range(c.shape[0]):
        nnzr = ia[i + 1] - ia[i]
        for j in range(nnzr):
            k = ja[ia[i] + j]
            dp = 0.0
            for l in range(n):
                dp += np.float64(c[i, l]) * np.float64(b[k, l])
            out[ia[i] + j] = np.float32(dp)


@njit(cache=True)
def _spmm_ref(ia, ja, avalues, b, out):
    n = b.shape[1]
    c_row = np.empty(n, dtype=np.float64)
    for i in range(out.shape[0]):
        for l in range(n):
            c_row[l] = 0.0
        nnzr = ia[i + 1] - ia[i]
        for j in range(nnzr):
            s = np.float64(avalues[ia[i] + j])
            k = ja[ia[i] + j]
            for l in range(n):
                c_row[l] += s * b[k, l]
        for l in range(n):
            out[i, l] = c_row[l]


@njit(cache=True)
def _fused_ref(ia, ja, c, b, d, out):
    n = c.shape[1]
    e_row = np.empty(n, dtype=np.float64)
    for i in range(c.shape[0]):
        nnzr = ia[i + 1] - ia[i]
        arow = np.zeros(nnzr, dtype=np.float32)
        for j in range(nnzr):
            k = ja[ia[i] + j]
            dp = 0.0
            for l in range(n):
                dp += np.float64(c[i, l]) * np.float64(b[k, l])
            arow[j] = np.float32(dp)
        for l in range(n):
            e_row[l] = 0.0
        for j in range(nnzr):
            s = np.float64(arow[j])
            k = ja[ia[i] + j]
            for l in range(n):
                e_row[l] += s * d[k, l]
        for l in range(n):
            out[i, l] = e_row[l]


# ---------------------------------------------------------------------------
# chunked kernels

@njit(cache=True, inline="always")
def _tree_sum(buf, n):
    """Pairwise reduction of buf[:n]; clobbers buf."""
    w = n
    while w > 1:
        h = w >> 1
        for t in range(h):
            buf[t] += buf[t + h]
        if w & 1:
            buf[0] += buf[w - 1]
        w = h
    return buf[0]


@njit(cache=True, inline="always")
def _load_block(src, start, width, dst):
    for t in range(width):
        dst[t] = src[start + t]


@njit(cache=True, inline="always")
def _saxpy_chunk(acc, scal, cols, width, dense):
    """acc += sum_j scal[j] * dense[cols[j]], four rows per pass, CSR order kept."""
    n = acc.shape[0]
    j = 0
    while j + 4 <= width:
        s0 = np.float64(scal[j])
        s1 = np.float64(scal[j + 1])
        s2 = np.float64(scal[j + 2])
        s3 = np.float64(scal[j + 3])
        r0 = dense[cols[j]]
        r1 = dense[cols[j + 1]]
        r2 = dense[cols[j + 2]]
        r3 = dense[cols[j + 3]]
        for q in range(n):
            acc[q] = (((acc[q] + s0 * r0[q]) + s1 * r1[q]) + s2 * r2[q]) + s3 * r3[q]
        j += 4
    while j < width:
        s0 = np.float64(scal[j])
        r0 = dense[cols[j]]
        for q in range(n):
            acc[q] += s0 * r0[q]
        j += 1


@njit(parallel=True, cache=True)
def _sddmm_chunked(ia, ja, c, b, nt, vlc, prefetch, out):
    m, n = c.shape
    for task in prange(m * nt):
        i = task // nt
        j = task - i * nt
        nnzr = ia[i + 1] - ia[i]
        nnzt = (nnzr + nt - 1) // nt
        lo = min(j * nnzt, nnzr)
        hi = min(lo + nnzt, nnzr)
        nchunks = (hi - lo + vlc - 1) // vlc

        reg_l = c[i].astype(np.float64)
        res = np.empty(n, dtype=np.float64)
        a_row = np.empty(vlc, dtype=np.float32)
        ja_block = np.empty(vlc, dtype=ja.dtype)
        ja_next = np.empty(vlc, dtype=ja.dtype)
        idxb = ia[i] + lo
        if prefetch and nchunks > 0:
            _load_block(ja, idxb, min(vlc, hi - lo), ja_next)
        for l in range(nchunks):
            width = min(vlc, ia[i] + hi - idxb)  # short final chunk
            if prefetch:
                ja_block, ja_next = ja_next, ja_block
                nxt = idxb + vlc
                if l + 1 < nchunks:
                    _load_block(ja, nxt, min(vlc, ia[i] + hi - nxt), ja_next)
            else:
                _load_block(ja, idxb, width, ja_block)
            for l0 in range(width):
                col = ja_block[l0]
                for q in range(n):
                    res[q] = reg_l[q] * b[col, q]
                a_row[l0] = np.float32(_tree_sum(res, n))
            for t in range(width):
                out[idxb + t] = a_row[t]
            idxb += vlc


@njit(parallel=True, cache=True)
def _spmm_chunked(ia, ja, avalues, b, vlc, prefetch, out):
    m = out.shape[0]
    n = b.shape[1]
    for i in prange(m):
        nnzr = ia[i + 1] - ia[i]
        nchunks = (nnzr + vlc - 1) // vlc
        end = ia[i + 1]
        c_row = np.zeros(n, dtype=np.float64)
        ja_block = np.empty(vlc, dtype=ja.dtype)
        ja_next = np.empty(vlc, dtype=ja.dtype)
        a_row = np.empty(vlc, dtype=np.float32)
        a_next = np.empty(vlc, dtype=np.float32)
        idxb = ia[i]
        if prefetch and nchunks > 0:
            _load_block(ja, idxb, min(vlc, end - idxb), ja_next)
            _load_block(avalues, idxb, min(vlc, end - idxb), a_next)
        for l in range(nchunks):
            width = min(vlc, end - idxb)
            if prefetch:
                ja_block, ja_next = ja_next, ja_block
                a_row, a_next = a_next, a_row
                nxt = idxb + vlc
                if l + 1 < nchunks:
                    _load_block(ja, nxt, min(vlc, end - nxt), ja_next)
                    _load_block(avalues, nxt, min(vlc, end - nxt), a_next)
            else:
                _load_block(ja, idxb, width, ja_block)
                _load_block(avalues, idxb, width, a_row)
            _saxpy_chunk(c_row, a_row, ja_block, width, b)
            idxb += vlc
        for q in range(n):
            out[i, q] = c_row[q]


@njit(parallel=True, cache=True)
def _fused_chunked(ia, ja, c, b, d, vlc, prefetch, out):
    m, n = c.shape
    for i in prange(m):
        nnzr = ia[i + 1] - ia[i]
        nchunks = (nnzr + vlc - 1) // vlc
        end = ia[i + 1]
        reg_l = c[i].astype(np.float64)
        res = np.empty(n, dtype=np.float64)
        e_row = np.zeros(n, dtype=np.float64)
        a_row = np.empty(vlc, dtype=np.float32)
        ja_block = np.empty(vlc, dtype=ja.dtype)
        ja_next = np.empty(vlc, dtype=ja.dtype)
        idxb = ia[i]
        if prefetch and nchunks > 0:
            _load_block(ja, idxb, min(vlc, end - idxb), ja_next)
        for l in range(nchunks):
            width = min(vlc, end - idxb)
            if prefetch:
                ja_block, ja_next = ja_next, ja_block
                nxt = idxb + vlc
                if l + 1 < nchunks:
                    _load_block(ja, nxt, min(vlc, end - nxt), ja_next)
            else:
                _load_block(ja, idxb, width, ja_block)
            # SDDMM half: chunk values stay in registers, never stored.
            for l0 in range(width):
                col = ja_block[l0]
                for q in range(n):
                    res[q] = reg_l[q] * b[col, q]
                a_row[l0] = np.float32(_tree_sum(res, n))
            # SpMM half consumes them immediately.
            _saxpy_chunk(e_row, a_row, ja_block, width, d)
            idxb += vlc
        for q in range(n):
            out[i, q] = e_row[q]


# ---------------------------------------------------------------------------
# public entry points

def sddmm_reference(pattern: CsrMatrix, c, b, config: KernelConfig | None = None) -> np.ndarray:
    c, b = _sddmm_operands(pattern, c, b)
    out = np.empty(pattern.nnz, dtype=VALUE_DTYPE)
    _sddmm_ref(pattern.row_ptr, pattern.col_idx, c, b, out)
    return out


def spmm_reference(a: CsrMatrix, b, config: KernelConfig | None = None) -> np.ndarray:
    b = _spmm_operands(a, b)
    out = np.empty((a.rows, b.shape[1]), dtype=VALUE_DTYPE)
    _spmm_ref(a.row_ptr, a.col_idx, a.values, b, out)
    return out


def fusedmm_reference(pattern: CsrMatrix, c, b, d, config: KernelConfig | None = None) -> np.ndarray:
    c, b, d = _fused_operands(pattern, c, b, d)
    out = np.empty((pattern.rows, c.shape[1]), dtype=VALUE_DTYPE)
    _fused_ref(pattern.row_ptr, pattern.col_idx, c, b, d, out)
    return out


def sddmm(pattern: CsrMatrix, c, b, config: KernelConfig | None = None) -> np.ndarray:
    """Sampled dense-dense product ``(C @ B.T)`` at the nonzeros of ``pattern``.

    Parameters
    ----------
    pattern : CsrMatrix
        ``M x K`` sampling mask; its values are ignored.
    c : (M, N) array
    b : (K, N) array
        Row ``k`` of ``b`` plays the role of column ``k`` of ``B.T``.
    config : KernelConfig, optional

    Returns
    -------
    values : (nnz,) float32 array
        One dot product per nonzero, in CSR order.
    """
    config = config or KernelConfig()
    c, b = _sddmm_operands(pattern, c, b)
    out = np.empty(pattern.nnz, dtype=VALUE_DTYPE)
    with _workers(config.workers):
        _sddmm_chunked(pattern.row_ptr, pattern.col_idx, c, b,
                       config.nt, config.vlc, config.prefetch, out)
    return out


def spmm(a: CsrMatrix, b, config: KernelConfig | None = None) -> np.ndarray:
    """Dense ``A @ B`` for CSR ``A``; ``config.nt`` is ignored."""
    config = config or KernelConfig()
    b = _spmm_operands(a, b)
    out = np.empty((a.rows, b.shape[1]), dtype=VALUE_DTYPE)
    with _workers(config.workers):
        _spmm_chunked(a.row_ptr, a.col_idx, a.values, b, config.vlc, config.prefetch, out)
    return out


def fusedmm(pattern: CsrMatrix, c, b, d, config: KernelConfig | None = None) -> np.ndarray:
    """``(C @ B.T sampled at pattern) @ D`` in one pass, one task per row.

    The sampled intermediate is never materialised. Only ``nt == 1`` is
    supported.
    """
    config = config or KernelConfig()
    if config.nt != 1:
        raise InvalidConfig(f"fusedmm runs one task per row; nt must be 1, got {config.nt}")
    c, b, d = _fused_operands(pattern, c, b, d)
    out = np.empty((pattern.rows, c.shape[1]), dtype=VALUE_DTYPE)
    with _workers(config.workers):
        _fused_chunked(pattern.row_ptr, pattern.col_idx, c, b, d,
                       config.vlc, config.prefetch, out)
    return out


KERNELS = {
    ("sddmm", "reference"): sddmm_reference,
    ("sddmm", "vectorized"): sddmm,
    ("spmm", "reference"): spmm_reference,
    ("spmm", "vectorized"): spmm,
    ("fusedmm", "reference"): fusedmm_reference,
    ("fusedmm", "vectorized"): fusedmm,
}
OPERATIONS = ("sddmm", "spmm", "fusedmm")
IMPLEMENTATIONS = ("reference", "vectorized")
