import numpy as np
import pytest

from sparsemm.csr import build_csr, dense_to_csr
from sparsemm.formats import MM_HEADER, read_matrix_market, read_raw, write_matrix_market, write_raw
from sparsemm.workload import gen_dense, gen_pattern

from .conftest import SMALL_DENSE


def test_matrix_market_small(tmp_path):
    a = dense_to_csr(SMALL_DENSE)
    path = tmp_path / "small.mtx"
    write_matrix_market(a, path, comment="small example")
    lines = path.read_text().splitlines()
    assert lines[0] == MM_HEADER
    assert lines[1] == "% small example"
    assert lines[2] == "5 4 9"
    # 1-based indices
    assert lines[3] == "1 3 1"
    assert lines[-1] == "5 4 9"
    assert read_matrix_market(path) == a


def test_matrix_market_float32_exact(tmp_path):
    p = gen_pattern(30, 50, 0.8, seed=1)
    a = p.with_values(gen_dense(1, p.nnz, seed=2).ravel())
    write_matrix_market(a, tmp_path / "a.mtx")
    b = read_matrix_market(tmp_path / "a.mtx")
    assert b == a


def test_matrix_market_empty(tmp_path):
    a = build_csr([], 3, 2)
    write_matrix_market(a, tmp_path / "e.mtx")
    assert read_matrix_market(tmp_path / "e.mtx") == a


def test_matrix_market_rejects_other_headers(tmp_path):
    path = tmp_path / "x.mtx"
    path.write_text("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n")
    with pytest.raises(ValueError):
        read_matrix_market(path)


def test_matrix_market_entry_count_checked(tmp_path):
    path = tmp_path / "x.mtx"
    path.write_text(MM_HEADER + "\n2 2 3\n1 1 1.0\n2 2 1.0\n")
    with pytest.raises(ValueError):
        read_matrix_market(path)


def test_raw_layout(tmp_path):
    a = dense_to_csr(SMALL_DENSE)
    path = tmp_path / "small.bin"
    write_raw(a, path)
    buf = path.read_bytes()
    assert len(buf) == 24 + 8 * 6 + 8 * 9 + 4 * 9
    assert np.frombuffer(buf, "<u8", 3).tolist() == [5, 4, 9]
    assert np.frombuffer(buf, "<u8", 6, offset=24).tolist() == [0, 2, 3, 5, 6, 9]
    assert np.frombuffer(buf, "<f4", 9, offset=24 + 48 + 72).tolist() == list(range(1, 10))
    assert read_raw(path) == a


def test_raw_truncated(tmp_path):
    path = tmp_path / "t.bin"
    write_raw(dense_to_csr(SMALL_DENSE), path)
    path.write_bytes(path.read_bytes()[:-4])
    with pytest.raises(ValueError):
        read_raw(path)
