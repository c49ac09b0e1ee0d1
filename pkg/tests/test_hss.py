import math

import numpy as np
import pytest

from curlra import EntryOracle, build_hss, cauchy_oracle, hss_benchmark, hss_matvec
from curlra.hss import REPORT_COLUMNS, hss_matvec_counted, partition
from curlra.linalg import numerical_rank


@pytest.fixture(scope="module")
def cauchy_tree():
    W = cauchy_oracle(n=256)
    tree = build_hss(W, 32, 1e-8, 24, ca_loops=5, seed=0)
    return W, tree


def test_cauchy_examples():
    assert cauchy_oracle([1.0], [1.5])(0, 0) == -2.0
    assert cauchy_oracle([1.0, 2.0], [1.5, 2.5])(0, 1) == pytest.approx(-2 / 3)
    with pytest.raises(ValueError):
        cauchy_oracle([1.0, 2.0], [2.0, 3.0])
    with pytest.raises(ValueError):
        cauchy_oracle()


def test_cauchy_off_diagonal_rank():
    A = cauchy_oracle(n=64).to_dense()
    assert numerical_rank(A[:32, 32:], 1e-8) <= 12
    assert numerical_rank(A[32:, :32], 1e-8) <= 12


def test_partition_tiles_the_matrix():
    leaves, pairs, depth = partition(100, 16)
    cover = np.zeros((100, 100), dtype=int)
    for r in leaves:
        cover[r.start:r.stop, r.start:r.stop] += 1
    for a, b in pairs:
        cover[a.start:a.stop, b.start:b.stop] += 1
        cover[b.start:b.stop, a.start:a.stop] += 1
    assert np.all(cover == 1)
    assert all(len(r) <= 16 for r in leaves) and depth == 3
    with pytest.raises(ValueError):
        partition(10, 0)


def test_block_diagonal_input_gives_rank_zero(rng):
    n = 64
    A = np.zeros((n, n))
    for s in range(0, n, 16):
        A[s:s + 16, s:s + 16] = rng.standard_normal((16, 16))
    tree = build_hss(EntryOracle.from_dense(A), 16, 1e-8, 8)
    assert tree.hss_rank == 0
    v = rng.standard_normal(n)
    np.testing.assert_allclose(hss_matvec(tree, v), A @ v, atol=1e-12)
    e0 = np.zeros(n)
    e0[0] = 1.0
    expected = np.zeros(n)
    expected[:16] = A[:16, 0]
    np.testing.assert_array_equal(hss_matvec(tree, e0), expected)


def test_exact_low_rank_blocks(rng):
    n, r = 128, 3
    A = rng.standard_normal((n, r)) @ rng.standard_normal((r, n))
    tree = build_hss(EntryOracle.from_dense(A), 16, 1e-8, 6)
    for b in tree.blocks:
        block = A[b.rows.start:b.rows.stop, b.cols.start:b.cols.stop]
        assert b.rank <= r
        assert np.linalg.norm(block - b.F @ b.H) <= 1e-9 * np.linalg.norm(block)
    assert np.linalg.norm(hss_matvec(tree, np.ones(n)) - A @ np.ones(n)) <= 1e-10 * np.linalg.norm(A @ np.ones(n))


def test_cauchy_tree_accuracy(cauchy_tree):
    W, tree = cauchy_tree
    A = W.to_dense()
    err = np.linalg.norm(A - tree.to_dense(), 2) / np.linalg.norm(A, 2)
    assert err <= 1e-6
    assert not tree.flagged and tree.hss_rank <= 24
    assert tree.access_count < 256 * 256


def test_matvec_against_dense(cauchy_tree, rng):
    W, tree = cauchy_tree
    A = W.to_dense()
    assert np.all(hss_matvec(tree, np.zeros(256)) == 0)
    for _ in range(20):
        v = rng.standard_normal(256)
        exact = A @ v
        assert np.linalg.norm(hss_matvec(tree, v) - exact) <= 1e-6 * np.linalg.norm(exact)
    with pytest.raises(ValueError):
        hss_matvec(tree, np.zeros(3))


def test_matvec_flop_bound(rng):
    c = 0
    for n in (128, 256, 512):
        tree = build_hss(cauchy_oracle(n=n), 32, 1e-8, 24, seed=1)
        _, flops = hss_matvec_counted(tree, rng.standard_normal(n))
        bound = n * tree.max_rank * max(1, math.log2(n / 32))
        c = max(c, flops / bound)
    assert c <= 8


def test_rank_cap_sets_the_flag():
    tree = build_hss(cauchy_oracle(n=128), 16, 1e-12, 2)
    assert tree.flagged and tree.hss_rank <= 2


def test_argument_validation():
    W = cauchy_oracle(n=32)
    with pytest.raises(ValueError):
        build_hss(W, 8, 0.0, 4)
    with pytest.raises(ValueError):
        build_hss(W, 8, 1e-8, 0)
    with pytest.raises(ValueError):
        build_hss(EntryOracle.from_dense(np.ones((4, 5))), 2, 1e-8, 1)


def test_benchmark_exact_rank_is_exact():
    report = hss_benchmark([64], [8], loops=(1,), trials=1, kind="rank", leaf_size=16)
    (row,) = report.rows
    assert row.spec_mean <= 1e-12 and row.cheb_mean <= 1e-12
    assert row.trials == 1 and row.hss_rank <= 3


def test_benchmark_csv_schema():
    report = hss_benchmark([64], [8], loops=(1, 5), trials=2, leaf_size=16)
    lines = report.to_csv().splitlines()
    assert lines[0].split(",") == REPORT_COLUMNS
    assert len(lines) == 3
    fields = lines[1].split(",")
    assert fields[0] == "cauchy-64" and fields[1] == "1" and fields[-1] == "2"
    float(fields[3]), float(fields[7])


def test_benchmark_more_loops_no_worse_on_median():
    report = hss_benchmark([128], [16], loops=(1, 5), trials=5, leaf_size=16)
    one, five = report.rows
    assert np.median(five.spec_errors) <= np.median(one.spec_errors)


def test_benchmark_guards():
    with pytest.raises(ValueError):
        hss_benchmark([8192], [8], trials=1)
    with pytest.raises(ValueError):
        hss_benchmark([64], [8], trials=0)
    with pytest.raises(ValueError):
        hss_benchmark([64], [8], trials=1, kind="toeplitz")
