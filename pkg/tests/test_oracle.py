import numpy as np
import pytest

from sparsemm.csr import build_csr, dense_to_csr, Triplet
from sparsemm.errors import ShapeMismatch
from sparsemm.oracle import compare, dense_sddmm_oracle, dense_spmm_oracle, fused_oracle
from sparsemm.workload import gen_dense, gen_pattern

from .conftest import SMALL_DENSE


def brute_sddmm(c, b, dense_mask):
    m, k = dense_mask.shape
    out = []
    for i in range(m):
        for j in range(k):
            if dense_mask[i, j]:
                out.append(sum(float(c[i, l]) * float(b[j, l]) for l in range(c.shape[1])))
    return np.array(out)


def test_sddmm_oracle_scalar():
    p = build_csr([Triplet(0, 0, 1.0)], 1, 1)
    assert dense_sddmm_oracle([[2.0]], [[3.0]], p).tolist() == [6.0]


def test_sddmm_oracle_all_ones():
    p = gen_pattern(6, 9, 0.5, seed=1)
    assert (dense_sddmm_oracle(np.ones((6, 32)), np.ones((9, 32)), p) == 32).all()


def test_sddmm_oracle_matches_brute_force():
    p = dense_to_csr(SMALL_DENSE)
    c, b = gen_dense(5, 3, 1), gen_dense(4, 3, 2)
    want = brute_sddmm(c, b, SMALL_DENSE != 0)
    np.testing.assert_allclose(dense_sddmm_oracle(c, b, p), want, rtol=1e-6)
    # hand check for the first nonzero, (0, 2)
    assert dense_sddmm_oracle(c, b, p)[0] == np.float32(float(c[0] @ b[2].astype(float)))


def test_spmm_oracle():
    np.testing.assert_array_equal(dense_spmm_oracle(np.eye(3), [[1, 2], [3, 4], [5, 6]]),
                                  [[1, 2], [3, 4], [5, 6]])
    assert dense_spmm_oracle(SMALL_DENSE, np.ones((4, 1))).ravel().tolist() == [3, 3, 9, 6, 24]
    np.testing.assert_array_equal(dense_spmm_oracle([[1, 2], [3, 4]], np.eye(2)), [[1, 2], [3, 4]])


def test_fused_oracle():
    p = gen_pattern(7, 8, 0.5, seed=3)
    b, d = gen_dense(8, 4, 1), gen_dense(8, 4, 2)
    assert not fused_oracle(np.zeros((7, 4)), b, d, p).any()
    full = dense_to_csr(np.ones((7, 8)))
    c = gen_dense(7, 4, 5)
    want = (c.astype(float) @ b.T.astype(float)) @ d.astype(float)
    assert compare(fused_oracle(c, b, d, full), want, atol=1e-5, rtol=1e-6)


def test_oracle_shape_errors():
    p = dense_to_csr(SMALL_DENSE)
    with pytest.raises(ShapeMismatch):
        dense_sddmm_oracle(np.ones((5, 3)), np.ones((4, 2)), p)
    with pytest.raises(ShapeMismatch):
        dense_spmm_oracle(np.ones((2, 3)), np.ones((2, 3)))
    with pytest.raises(ShapeMismatch):
        fused_oracle(np.ones((5, 3)), np.ones((4, 3)), np.ones((3, 3)), p)


def test_compare_exact():
    r = compare([1.0, 2.0], [1.0, 2.0])
    assert r.passed and r.max_abs_err == 0 and r.max_rel_err == 0


def test_compare_within_atol():
    assert compare([1.0], [1.0 + 5e-6], atol=1e-5).passed


def test_compare_fail():
    r = compare([1.0], [1.1], atol=1e-5, rtol=1e-4)
    assert not r.passed and r.worst_index == (0,)
    assert "FAIL" in r.summary()


def test_compare_worst_is_largest_excess():
    x = np.array([[100.0, 0.0], [0.0, 0.0]])
    y = np.array([[100.001, 0.0], [0.0, 5e-4]])
    r = compare(x, y)
    assert not r.passed and r.worst_index == (1, 1)


def test_compare_nan_fails():
    assert not compare([np.nan], [1.0]).passed


def test_compare_shape_error():
    with pytest.raises(ShapeMismatch):
        compare([1.0, 2.0], [1.0])


def test_compare_invariant_random(rng):
    x = rng.normal(size=1000)
    y = x + rng.normal(scale=1e-4, size=1000)
    r = compare(x, y, atol=1e-5, rtol=1e-4)
    ok = np.abs(x - y) <= 1e-5 + 1e-4 * np.maximum(np.abs(x), np.abs(y))
    assert r.passed == bool(ok.all())
