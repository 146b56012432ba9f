"""Synthetic operands and the 72-case benchmark grid.

Every generator here is a pure function of its arguments. Random streams come
from numpy's counter-based Philox bit generator, so a seed fully determines the
output regardless of how many workers later consume it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .csr import INDEX_DTYPE, VALUE_DTYPE, CsrMatrix
from .errors import DegenerateRow

KI = 1024

GRID_SHAPES = [
    (1 * KI, 1 * KI), (3 * KI, 1 * KI), (4 * KI, 1 * KI),
    (2 * KI, 2 * KI), (6 * KI, 2 * KI), (8 * KI, 2 * KI),
    (4 * KI, 4 * KI), (12 * KI, 4 * KI), (16 * KI, 4 * KI),
    (8 * KI, 8 * KI), (24 * KI, 8 * KI), (32 * KI, 8 * KI),
]
GRID_SPARSITIES = (0.7, 0.8, 0.9)
GRID_NS = (32, 128)
MIN_SCALED_DIM = 64

_MASK64 = (1 << 64) - 1

# Tags that decorrelate the operand streams drawn from one case seed.
_TAG_PATTERN, _TAG_VALUES, _TAG_C, _TAG_B, _TAG_D = range(1, 6)


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def mix_seed(*parts: int) -> int:
    """Fold integers into one 64-bit seed."""
    h = 0
    for p in parts:
        h = _splitmix64(h ^ (int(p) & _MASK64))
    return h


def case_seed(m: int, k: int, n: int, sparsity: float) -> int:
    return mix_seed(m, k, n, round(100 * sparsity))


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed) & _MASK64))


@dataclass(frozen=True)
class BenchmarkCase:
    m: int
    k: int
    n: int
    sparsity: float
    seed: int = 0

    def __post_init__(self):
        if min(self.m, self.k, self.n) < 1:
            raise ValueError(f"dimensions must be positive: {self}")
        if not 0.0 <= self.sparsity < 1.0:
            raise ValueError(f"sparsity must lie in [0, 1), got {self.sparsity}")

    @classmethod
    def from_dims(cls, m, k, n, sparsity) -> "BenchmarkCase":
        """Case with the seed derived from its parameters."""
        return cls(m, k, n, sparsity, case_seed(m, k, n, sparsity))

    @property
    def nnz_per_row(self) -> int:
        return nnz_per_row(self.k, self.sparsity)

    @property
    def nnz(self) -> int:
        return self.m * self.nnz_per_row

    @property
    def label(self) -> str:
        def short(x):
            return f"{x // KI}k" if x % KI == 0 else str(x)
        return f"{short(self.m)},{short(self.k)},{self.n},{round(100 * self.sparsity)}%"


def nnz_per_row(k: int, sparsity: float) -> int:
    return int(round(k * (1.0 - sparsity)))


def gen_pattern(m: int, k: int, sparsity: float, seed: int) -> CsrMatrix:
    """Uniform random mask with exactly ``round(k * (1 - sparsity))`` entries per row.

    Columns of each row are a uniform sample without replacement, stored
    sorted. All values are 1.
    """
    r = nnz_per_row(k, sparsity)
    if r < 1:
        raise DegenerateRow(f"k={k}, sparsity={sparsity} leaves {r} nonzeros per row")
    rng = _rng(seed)
    col_idx = np.empty((m, r), dtype=INDEX_DTYPE)
    if r == k:
        col_idx[:] = np.arange(k)
    else:
        # Random keys + partial sort = uniform subset; blocks bound the memory.
        block = max(1, (1 << 22) // k)
        for start in range(0, m, block):
            stop = min(m, start + block)
            keys = rng.random((stop - start, k), dtype=np.float32)
            pick = np.argpartition(keys, r - 1, axis=1)[:, :r]
            pick.sort(axis=1)
            col_idx[start:stop] = pick
    row_ptr = np.arange(m + 1, dtype=INDEX_DTYPE) * r
    return CsrMatrix(m, k, row_ptr, col_idx.reshape(-1), np.ones(m * r, dtype=VALUE_DTYPE))


def gen_dense(rows: int, cols: int, seed: int) -> np.ndarray:
    """``rows x cols`` float32 matrix, entries i.i.d. uniform on [-1, 1)."""
    if rows < 1 or cols < 1:
        raise ValueError(f"dense shape must be positive, got {rows}x{cols}")
    u = _rng(seed).random((rows, cols), dtype=np.float32)
    return np.ascontiguousarray(u * np.float32(2) - np.float32(1))


def gen_values(nnz: int, seed: int) -> np.ndarray:
    if nnz == 0:
        return np.empty(0, dtype=VALUE_DTYPE)
    return gen_dense(1, nnz, seed).reshape(-1)


@dataclass(frozen=True)
class Operands:
    """Everything the three kernels need for one case.

    ``pattern`` carries unit values (the sampling mask); ``a`` has the same
    structure with random values and feeds SpMM.
    """

    pattern: CsrMatrix
    a: CsrMatrix
    c: np.ndarray
    b: np.ndarray
    d: np.ndarray


def make_operands(case: BenchmarkCase) -> Operands:
    s = case.seed
    pattern = gen_pattern(case.m, case.k, case.sparsity, mix_seed(s, _TAG_PATTERN))
    a = pattern.with_values(gen_values(pattern.nnz, mix_seed(s, _TAG_VALUES)))
    return Operands(
        pattern=pattern,
        a=a,
        c=gen_dense(case.m, case.n, mix_seed(s, _TAG_C)),
        b=gen_dense(case.k, case.n, mix_seed(s, _TAG_B)),
        d=gen_dense(case.k, case.n, mix_seed(s, _TAG_D)),
    )


def paper_grid() -> list[BenchmarkCase]:
    """The 72 benchmark cases, ordered N, then (M, K), then sparsity."""
    return [
        BenchmarkCase.from_dims(m, k, n, alpha)
        for n in GRID_NS
        for m, k in GRID_SHAPES
        for alpha in GRID_SPARSITIES
    ]


def scaled_grid(scale_divisor: int) -> list[BenchmarkCase]:
    """The full grid with M and K divided by ``scale_divisor`` (floored at 64)."""
    d = int(scale_divisor)
    if d < 1 or d & (d - 1) or KI % d:
        raise ValueError(f"scale divisor must be a power of two dividing {KI}, got {scale_divisor}")
    if d == 1:
        return paper_grid()
    return [
        BenchmarkCase.from_dims(
            max(MIN_SCALED_DIM, c.m // d), max(MIN_SCALED_DIM, c.k // d), c.n, c.sparsity
        )
        for c in paper_grid()
    ]
