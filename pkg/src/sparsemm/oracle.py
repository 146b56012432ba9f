"""Dense reference results and tolerance comparison.

The oracles go through full dense products in float64 and round to float32 only
at the end. They share no code with :mod:`sparsemm.kernels`, so agreement
between the two is real evidence.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .csr import CsrMatrix, csr_to_dense
from .errors import ShapeMismatch

ATOL = 1e-5
RTOL = 1e-4


def _f64(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ShapeMismatch(f"expected a 2-D matrix, got {x.ndim}-D")
    return x


def dense_sddmm_oracle(c, b, pattern: CsrMatrix) -> np.ndarray:
    c, b = _f64(c), _f64(b)
    if c.shape[0] != pattern.rows or b.shape[0] != pattern.cols or c.shape[1] != b.shape[1]:
        raise ShapeMismatch(
            f"C {c.shape}, B {b.shape} incompatible with a {pattern.rows}x{pattern.cols} pattern"
        )
    full = c @ b.T
    rows = np.repeat(np.arange(pattern.rows), np.diff(pattern.row_ptr))
    return full[rows, pattern.col_idx].astype(np.float32)


def dense_spmm_oracle(a_dense, b) -> np.ndarray:
    a, b = _f64(a_dense), _f64(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeMismatch(f"inner dimensions differ: {a.shape} @ {b.shape}")
    return (a @ b).astype(np.float32)


def fused_oracle(c, b, d, pattern: CsrMatrix) -> np.ndarray:
    d = _f64(d)
    if d.shape[0] != pattern.cols:
        raise ShapeMismatch(f"D has {d.shape[0]} rows, pattern has {pattern.cols} columns")
    sampled = pattern.with_values(dense_sddmm_oracle(c, b, pattern))
    if d.shape[1] != np.asarray(c).shape[1]:
        raise ShapeMismatch(f"D has {d.shape[1]} columns, C has {np.asarray(c).shape[1]}")
    return dense_spmm_oracle(csr_to_dense(sampled), d)


@dataclass(frozen=True)
class ComparisonReport:
    max_abs_err: float
    max_rel_err: float
    worst_index: tuple | None
    passed: bool
    atol: float
    rtol: float

    def __bool__(self):
        return self.passed

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status} max_abs={self.max_abs_err:.3e} max_rel={self.max_rel_err:.3e} "
            f"worst={self.worst_index} (atol={self.atol:g}, rtol={self.rtol:g})"
        )


def compare(x, y, atol: float = ATOL, rtol: float = RTOL) -> ComparisonReport:
    """Elementwise ``|x - y| <= atol + rtol * max(|x|, |y|)``.

    Mismatches are reported, not raised. The worst element is the one that
    exceeds its bound by the largest margin.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ShapeMismatch(f"cannot compare shapes {x.shape} and {y.shape}")
    if x.size == 0:
        return ComparisonReport(0.0, 0.0, None, True, atol, rtol)

    err = np.abs(x - y)
    scale = np.maximum(np.abs(x), np.abs(y))
    bound = atol + rtol * scale
    nan = np.isnan(x) | np.isnan(y)
    excess = np.where(nan, np.inf, err - bound)
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(scale > 0, err / scale, 0.0)
    worst = np.unravel_index(int(np.argmax(excess)), x.shape)
    return ComparisonReport(
        max_abs_err=float(np.nanmax(np.where(nan, np.inf, err))),
        max_rel_err=float(np.nanmax(np.where(nan, np.inf, rel))),
        worst_index=tuple(int(i) for i in worst),
        passed=bool(np.all(excess <= 0)),
        atol=atol,
        rtol=rtol,
    )
