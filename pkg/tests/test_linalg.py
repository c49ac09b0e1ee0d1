import math

import numpy as np
import pytest

from curlra.linalg import (
    LogVolume,
    norms,
    numerical_rank,
    projective_volume,
    pseudo_inverse,
    rank_truncation,
    singular_values,
    svd,
    truncated_pseudo_inverse,
    volume,
    zero_threshold,
)


def test_svd_diagonal():
    f = svd(np.diag([3.0, 2.0]))
    assert f.rank == 2
    np.testing.assert_allclose(f.sigma, [3, 2])


def test_svd_all_ones_has_rank_one():
    f = svd(np.ones((2, 2)))
    assert f.rank == 1
    assert f.sigma[0] == pytest.approx(2.0)


def test_svd_reconstructs_gaussian(rng):
    M = rng.standard_normal((8, 5))
    f = svd(M)
    assert np.linalg.norm(M - f.reconstruct(), 2) <= 1e-10 * f.sigma[0]
    np.testing.assert_allclose(f.S.T @ f.S, np.eye(5), atol=1e-12)
    np.testing.assert_allclose(f.T.T @ f.T, np.eye(5), atol=1e-12)


def test_svd_of_zero_matrix_is_empty():
    f = svd(np.zeros((3, 4)))
    assert f.rank == 0
    assert f.S.shape == (3, 0) and f.T.shape == (4, 0)


def test_rejects_non_finite():
    with pytest.raises(ValueError):
        svd(np.array([[1.0, np.nan]]))


def test_norms_examples():
    assert norms(np.eye(3)) == pytest.approx((1, math.sqrt(3), 1))
    assert norms(np.diag([3.0, 2.0])) == pytest.approx((3, math.sqrt(13), 3))


def test_pseudo_inverse_examples(rng):
    np.testing.assert_allclose(pseudo_inverse(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]))
    Q, _ = np.linalg.qr(rng.standard_normal((5, 5)))
    np.testing.assert_allclose(pseudo_inverse(Q), Q.T, atol=1e-12)


def test_pseudo_inverse_penrose_conditions(rng):
    A = rng.standard_normal((6, 2)) @ rng.standard_normal((2, 4))
    P = pseudo_inverse(A)
    np.testing.assert_allclose(A @ P @ A, A, atol=1e-10)
    np.testing.assert_allclose(P @ A @ P, P, atol=1e-10)
    np.testing.assert_allclose(A @ P, (A @ P).T, atol=1e-10)


def test_rank_truncation_examples(rng):
    np.testing.assert_allclose(rank_truncation(np.diag([3.0, 2, 1]), 2), np.diag([3.0, 2, 0]), atol=1e-14)
    M = rng.standard_normal((4, 2)) @ rng.standard_normal((2, 5))
    np.testing.assert_array_equal(rank_truncation(M, 3), M)
    G = rng.standard_normal((6, 6))
    s = singular_values(G)
    err = np.linalg.norm(G - rank_truncation(G, 3), 2)
    assert abs(err - s[3]) <= 1e-10 * s[0]
    with pytest.raises(ValueError):
        rank_truncation(G, 0)


def test_truncated_pseudo_inverse_matches_composition(rng):
    G = rng.standard_normal((5, 4))
    np.testing.assert_allclose(truncated_pseudo_inverse(G, 2),
                               pseudo_inverse(rank_truncation(G, 2)), atol=1e-10)


@pytest.mark.parametrize("M, eps, expected", [
    (np.zeros((3, 3)), 1e-8, 0),
    (np.diag([1.0, 1e-12]), 1e-8, 1),
    (np.diag([1.0, 0.5, 1e-9]), 1e-8, 2),
])
def test_numerical_rank_examples(M, eps, expected):
    assert numerical_rank(M, eps) == expected


def test_numerical_rank_rejects_bad_eps():
    with pytest.raises(ValueError):
        numerical_rank(np.eye(2), 0.0)


def test_volume_examples():
    assert math.exp(volume(np.eye(2)).log_value) == pytest.approx(1.0)
    assert volume(np.diag([3.0, 2.0])).value == pytest.approx(6.0)
    assert volume(np.ones((2, 2))).is_zero


def test_projective_volume_examples(rng):
    D = np.diag([3.0, 2.0, 1.0])
    assert projective_volume(D, 1).value == pytest.approx(3.0)
    assert projective_volume(D, 3).value == pytest.approx(6.0)
    assert projective_volume(D, 3) == volume(D)
    M = rng.standard_normal((5, 4))
    s = np.linalg.svd(M, compute_uv=False)
    assert projective_volume(M, 2).log_value == pytest.approx(math.log(s[0] * s[1]))
    with pytest.raises(ValueError):
        projective_volume(M, 5)


def test_volume_is_log_space_safe():
    big = np.diag(np.full(60, 1e10))
    v = volume(big)
    assert not v.is_zero
    assert v.log_value == pytest.approx(60 * math.log(1e10))
    assert v.value == math.inf


def test_zero_threshold_scales_with_shape():
    assert zero_threshold((3, 7), 2.0) == 7 * np.finfo(float).eps * 2.0


def test_log_volume_comparisons():
    a, b = LogVolume(False, math.log(2.0)), LogVolume(False, 0.0)
    zero = LogVolume(True, -math.inf)
    assert a.log_ratio(b) == pytest.approx(math.log(2))
    assert a.exceeds(b, 0.5) and not a.exceeds(b, 1.5)
    assert zero.log_ratio(a) == -math.inf and a.log_ratio(zero) == math.inf
    assert math.isnan(zero.log_ratio(zero))
    assert not zero.exceeds(zero, 0.1)
    assert (a * b).log_value == pytest.approx(math.log(2)) and (a * zero).is_zero
