"""Run the three kernels on a generated case and compare them with the dense
float64 oracles and the scalar references."""
import sys

from sparsemm import kernels, oracle, workload
from sparsemm.csr import csr_to_dense
from sparsemm.kernels import KernelConfig

m, k, n, sparsity = 512, 700, 128, 0.8
if len(sys.argv) == 5:
    m, k, n = (int(x) for x in sys.argv[1:4])
    sparsity = float(sys.argv[4])

case = workload.BenchmarkCase.from_dims(m, k, n, sparsity)
ops = workload.make_operands(case)
print(f"case {case.label}: {case.nnz_per_row} nonzeros per row, nnz={case.nnz}")

nt = kernels.select_nt(m)
sampled = kernels.sddmm(ops.pattern, ops.c, ops.b, KernelConfig(nt=nt))
product = kernels.spmm(ops.a, ops.b)
fused = kernels.fusedmm(ops.pattern, ops.c, ops.b, ops.d)

checks = [
    ("sddmm vs oracle", sampled, oracle.dense_sddmm_oracle(ops.c, ops.b, ops.pattern)),
    ("sddmm vs scalar", sampled, kernels.sddmm_reference(ops.pattern, ops.c, ops.b)),
    ("spmm vs oracle", product, oracle.dense_spmm_oracle(csr_to_dense(ops.a), ops.b)),
    ("spmm vs scalar", product, kernels.spmm_reference(ops.a, ops.b)),
    ("fusedmm vs oracle", fused, oracle.fused_oracle(ops.c, ops.b, ops.d, ops.pattern)),
    ("fusedmm vs two-step", fused, kernels.spmm(ops.pattern.with_values(sampled), ops.d)),
]
for name, got, want in checks:
    print(f"{name:22s} {oracle.compare(got, want).summary()}")

# The fused kernel rounds its intermediate to float32, so it matches the
# two-step result exactly.
print("fused == spmm(sddmm):", (fused == kernels.spmm(ops.pattern.with_values(sampled), ops.d)).all())
