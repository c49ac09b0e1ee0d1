import numpy as np
import pytest

from curlra import EntryOracle, build_cur, canonical_nucleus, cheb_error, index_set
from curlra.cur import CurFactors, zero_cur


def test_index_set_sorts_and_validates():
    assert index_set([3, 1, 2]) == (1, 2, 3)
    with pytest.raises(ValueError):
        index_set([1, 1])
    with pytest.raises(ValueError):
        index_set([-1])
    with pytest.raises(ValueError):
        index_set([4], bound=4)


def test_repeated_reads_count_once():
    W = EntryOracle.from_dense(np.arange(12.0).reshape(3, 4))
    assert W(1, 2) == 6.0
    assert W(1, 2) == 6.0
    assert W.access_count == 1
    W.rows([1])
    assert W.access_count == 4
    W.cols([2])
    assert W.access_count == 6
    assert (0, 2) in W.accessed() and (0, 0) not in W.accessed()


def test_verification_reads_are_free():
    A = np.arange(6.0).reshape(2, 3)
    W = EntryOracle.from_dense(A)
    np.testing.assert_array_equal(W.to_dense(), A)
    assert W.access_count == 0
    W.to_dense(count=True)
    assert W.access_count == 6


def test_views_share_the_counter():
    A = np.arange(16.0).reshape(4, 4)
    W = EntryOracle.from_dense(A)
    V = W.view(range(2, 4), range(0, 2))
    np.testing.assert_array_equal(V.to_dense(), A[2:, :2])
    assert V(0, 1) == A[2, 1]
    assert W.access_count == 1
    assert W.accessed() == {(2, 1)}
    assert V.accessed() == {(0, 1)}


def test_out_of_range_and_non_finite():
    W = EntryOracle.from_dense(np.eye(2))
    with pytest.raises(IndexError):
        W(2, 0)
    bad = EntryOracle((2, 2), lambda I, J: np.full(I.shape, np.inf))
    with pytest.raises(ValueError):
        bad(0, 0)
    with pytest.raises(ValueError):
        EntryOracle((0, 2), lambda I, J: I)


def test_diagonal_and_cells():
    A = np.arange(9.0).reshape(3, 3)
    W = EntryOracle.from_dense(A)
    np.testing.assert_array_equal(W.diagonal(), [0, 4, 8])
    np.testing.assert_array_equal(W.cells([0, 2], [1, 0]), [1, 6])
    assert W.access_count == 5


def test_build_cur_is_exact_on_rank_r(rng):
    A = rng.standard_normal((10, 3)) @ rng.standard_normal((3, 8))
    W = EntryOracle.from_dense(A)
    cur = build_cur(W, [0, 4, 7], [1, 2, 5], 3)
    assert cur.shape == (10, 8)
    np.testing.assert_array_equal(cur.C, A[:, [1, 2, 5]])
    np.testing.assert_array_equal(cur.R, A[[0, 4, 7]])
    assert cheb_error(W, cur) <= 1e-12 * np.max(np.abs(A)) * 100
    assert W.access_count == 10 * 3 + 3 * 8 - 9


def test_entries_match_dense_product(rng):
    A = rng.standard_normal((7, 6))
    cur = build_cur(EntryOracle.from_dense(A), [0, 1, 2], [3, 4], 2)
    rows, cols = rng.integers(0, 7, 20), rng.integers(0, 6, 20)
    np.testing.assert_allclose(cur.entries(rows, cols), cur.to_dense()[rows, cols], atol=1e-12)


def test_canonical_nucleus_is_inverse_for_square_generator(rng):
    G = rng.standard_normal((3, 3))
    np.testing.assert_allclose(canonical_nucleus(G, 3), np.linalg.inv(G), atol=1e-10)


def test_cheb_error_examples(rng):
    A = rng.standard_normal((6, 5))
    W = EntryOracle.from_dense(A)
    z = zero_cur(A.shape)
    assert cheb_error(W, z) == pytest.approx(np.max(np.abs(A)))
    cur = build_cur(W, [0, 1], [0, 1], 2)
    assert cheb_error(W, cur) == pytest.approx(np.max(np.abs(A - cur.to_dense())))
    assert W.access_count == 6 * 2 + 2 * 5 - 4


def test_factor_shape_validation():
    with pytest.raises(ValueError):
        CurFactors((0,), (0,), np.zeros((3, 1)), np.zeros((2, 1)), np.zeros((1, 3)), 1)
    with pytest.raises(ValueError):
        CurFactors((0,), (0,), np.zeros((3, 1)), np.zeros((1, 1)), np.zeros((1, 3)), 2)
