"""Build a small CSR matrix by hand, look at its arrays, and round-trip it
through Matrix Market and the raw binary layout."""
import tempfile
from pathlib import Path

import numpy as np

from sparsemm import build_csr, csr_to_dense, dense_to_csr, validate
from sparsemm.csr import Triplet
from sparsemm.formats import read_matrix_market, read_raw, write_matrix_market, write_raw

dense = np.array([
    [0, 0, 1, 2],
    [0, 0, 3, 0],
    [4, 5, 0, 0],
    [6, 0, 0, 0],
    [7, 0, 8, 9],
], dtype=np.float32)

# Triplets can arrive in any order; build_csr sorts them.
rows, cols = np.nonzero(dense)
trips = [Triplet(int(r), int(c), float(dense[r, c])) for r, c in zip(rows, cols)][::-1]
a = build_csr(trips, 5, 4)

print("row_ptr", a.row_ptr.tolist())
print("col_idx", a.col_idx.tolist())
print("values ", a.values.tolist())
print("nonzeros per row", a.row_nnz().tolist())
print("problems:", validate(a) or "none")

assert a == dense_to_csr(dense)
assert np.array_equal(csr_to_dense(a), dense)

with tempfile.TemporaryDirectory() as tmp:
    mtx, raw = Path(tmp) / "a.mtx", Path(tmp) / "a.bin"
    write_matrix_market(a, mtx)
    write_raw(a, raw)
    print()
    print(mtx.read_text())
    print(f"raw file: {raw.stat().st_size} bytes")
    assert read_matrix_market(mtx) == a and read_raw(raw) == a

print("round trips exact")
