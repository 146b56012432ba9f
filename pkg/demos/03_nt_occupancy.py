"""How the tasks-per-row count is picked: the smallest NT that best fills
whole groups of 4096 work items."""
from sparsemm.kernels import NT_CHOICES, OCCUPANCY_WORK_ITEMS, occupancy, select_nt

print(f"work items per wave: {OCCUPANCY_WORK_ITEMS}")
print(f"{'M':>6s} " + " ".join(f"nt={nt:<4d}" for nt in NT_CHOICES) + "  pick")
for m in (64, 256, 1000, 1024, 2048, 3072, 4096, 5000, 8192, 12288, 32768):
    occ = " ".join(f"{occupancy(m, nt):7.3f}" for nt in NT_CHOICES)
    print(f"{m:6d} {occ}  {select_nt(m)}")

# A row of 300 nonzeros with nt=4 and 32-wide chunks leaves a short tail.
nnzr, nt, vlc = 300, 4, 32
share = -(-nnzr // nt)
print(f"\nnnzr={nnzr}, nt={nt}: shares of {share}, {share // vlc} full chunks + tail of {share % vlc}")
