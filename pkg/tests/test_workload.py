import numpy as np
import pytest

from sparsemm.csr import validate
from sparsemm.errors import DegenerateRow
from sparsemm.workload import (
    BenchmarkCase, case_seed, gen_dense, gen_pattern, make_operands, paper_grid, scaled_grid,
)


def test_fixed_row_count():
    for seed in (0, 1, 99):
        a = gen_pattern(4, 10, 0.7, seed)
        assert a.row_nnz().tolist() == [3, 3, 3, 3]
        assert a.nnz == 12
        assert validate(a) == []


def test_fully_dense_pattern():
    a = gen_pattern(3, 5, 0.0, seed=8)
    assert a.col_idx.reshape(3, 5).tolist() == [list(range(5))] * 3
    assert (a.values == 1).all()


def test_pattern_deterministic():
    assert gen_pattern(50, 200, 0.8, 12345) == gen_pattern(50, 200, 0.8, 12345)
    assert gen_pattern(50, 200, 0.8, 12345) != gen_pattern(50, 200, 0.8, 12346)


def test_degenerate_row():
    with pytest.raises(DegenerateRow):
        gen_pattern(4, 3, 0.9, 0)


def test_pattern_columns_uniform():
    # Each column should be hit m*r/k times on average; chi-square style bound.
    m, k, r = 4000, 50, 10
    a = gen_pattern(m, k, 1 - r / k, seed=5)
    counts = np.bincount(a.col_idx, minlength=k)
    expected = m * r / k
    chi2 = ((counts - expected) ** 2 / expected).sum()
    # 49 dof: mean 49, sd ~10; 120 is far in the tail.
    assert chi2 < 120


def test_pattern_blocks_do_not_change_output():
    # k large enough that generation spans several row blocks.
    a = gen_pattern(600, 8192, 0.9, seed=77)
    assert a.nnz == 600 * 819
    assert validate(a) == []


def test_dense_range_and_determinism():
    x = gen_dense(64, 32, seed=3)
    assert x.dtype == np.float32 and x.shape == (64, 32)
    assert x.min() >= -1 and x.max() <= 1
    np.testing.assert_array_equal(x, gen_dense(64, 32, seed=3))
    assert not np.array_equal(x, gen_dense(64, 32, seed=4))


def test_dense_mean():
    # Uniform on [-1, 1]: sd 0.577, standard error of 1e6 samples ~5.8e-4.
    x = gen_dense(1000, 1000, seed=11)
    assert abs(float(x.mean(dtype=np.float64))) < 0.01


def test_full_grid():
    grid = paper_grid()
    assert len(grid) == 72
    dims = {(c.m, c.k, c.n, c.sparsity) for c in grid}
    assert len(dims) == 72
    assert (8192, 8192, 128, 0.7) in dims
    assert (32768, 8192, 32, 0.9) in dims
    assert {c.n for c in grid} == {32, 128}
    assert all(c.seed == case_seed(c.m, c.k, c.n, c.sparsity) for c in grid)
    assert grid[0].label == "1k,1k,32,70%"
    assert grid[35].label == "32k,8k,32,90%"


def test_scaled_grid():
    g8 = scaled_grid(8)
    assert len(g8) == 72
    assert [(c.n, c.sparsity) for c in g8] == [(c.n, c.sparsity) for c in paper_grid()]
    assert (1024, 1024, 128, 0.7) in {(c.m, c.k, c.n, c.sparsity) for c in g8}
    assert scaled_grid(1) == paper_grid()
    assert min(c.k for c in scaled_grid(1024)) == 64


@pytest.mark.parametrize("bad", [0, 3, 2048, 6])
def test_scaled_grid_rejects(bad):
    with pytest.raises(ValueError):
        scaled_grid(bad)


def test_case_validation():
    with pytest.raises(ValueError):
        BenchmarkCase(4, 4, 32, 1.0)
    with pytest.raises(ValueError):
        BenchmarkCase(0, 4, 32, 0.5)


def test_operands_shapes_and_reuse():
    case = BenchmarkCase.from_dims(96, 80, 32, 0.8)
    ops = make_operands(case)
    assert ops.pattern.shape == (96, 80) and ops.a.shape == (96, 80)
    np.testing.assert_array_equal(ops.pattern.col_idx, ops.a.col_idx)
    assert (ops.pattern.values == 1).all()
    assert ops.c.shape == (96, 32) and ops.b.shape == (80, 32) and ops.d.shape == (80, 32)
    assert not np.array_equal(ops.b, ops.d)
    again = make_operands(case)
    assert again.a == ops.a and np.array_equal(again.c, ops.c)
