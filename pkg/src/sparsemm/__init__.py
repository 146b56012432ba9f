"""Sparse-matrix kernels for machine-learning workloads.

SDDMM, SpMM and their fusion over CSR storage, each with a scalar reference
and a chunked parallel kernel, plus dense oracles and a benchmark harness.
"""
import warnings

# numba probes TBB before falling back to OpenMP; the probe's version warning is noise.
warnings.filterwarnings("ignore", message="The TBB threading layer requires")

from .csr import CsrMatrix, Triplet, build_csr, csr_to_dense, dense_to_csr, validate  # noqa: E402
from .errors import (  # noqa: E402
    DegenerateRow, DuplicateEntry, InvalidConfig, InvalidMatrix, OutOfBounds,
    ShapeMismatch, SparseMMError,
)
from .kernels import (  # noqa: E402
    KernelConfig, fusedmm, fusedmm_reference, occupancy, sddmm, sddmm_reference,
    select_nt, spmm, spmm_reference,
)
from .oracle import compare, dense_sddmm_oracle, dense_spmm_oracle, fused_oracle  # noqa: E402
from .workload import BenchmarkCase, gen_dense, gen_pattern, paper_grid, scaled_grid  # noqa: E402

__version__ = "0.1.0"
