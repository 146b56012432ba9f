"""Time a shrunken benchmark grid and print throughput next to the
arithmetic-intensity bounds. Pass a divisor (default 32) to pick the scale."""
import sys

from sparsemm import bench, workload

div = int(sys.argv[1]) if len(sys.argv) > 1 else 32
grid = [c for c in workload.scaled_grid(div) if c.n == 128]

results = bench.run_grid(grid, ("sddmm", "spmm", "fusedmm"), iterations=5)
print(f"{'op':8s} {'case':24s} {'ms':>9s} {'Gflop/s':>8s} {'ai_worst':>9s} {'ai_best':>8s}")
for r in results:
    print(f"{r.operation:8s} {r.case.label:24s} {r.min_time * 1e3:9.3f} {r.gflops_per_s:8.2f} "
          f"{r.ai_worst:9.3f} {r.ai_best:8.2f}")

w, b = bench.arithmetic_intensity_bounds(8192, 8192, 128, workload.BenchmarkCase.from_dims(
    8192, 8192, 128, 0.7).nnz)
print(f"\nfull-size 8k x 8k, N=128, 70% zeros: {w:.3f} to {b:.1f} flop/byte")
