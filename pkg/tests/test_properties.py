"""Randomized properties over generated shapes and entries."""

import math

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from curlra import EntryOracle, SpsdConfig, build_cur, gecp_spsd, index_set, spsd_main
from curlra.linalg import norms, projective_volume, pseudo_inverse, singular_values, volume
from curlra.matrixfile import format_matrix, parse_matrix
from curlra.oracle import brute_force_max_volume

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)
shapes = st.tuples(st.integers(1, 7), st.integers(1, 7))
matrices = shapes.flatmap(lambda s: arrays(np.float64, s, elements=finite))
seeds = st.integers(0, 2**32 - 1)
common = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@common
@given(matrices)
def test_norm_chain(A):
    spec, frob, cheb = norms(A)
    m, n = A.shape
    slack = 1e-12 * (frob + 1e-300)
    assert cheb <= spec + slack
    assert spec <= frob + slack
    assert frob <= math.sqrt(m * n) * cheb + slack
    assert frob**2 <= min(m, n) * spec**2 * (1 + 1e-12) + 1e-300


@common
@given(matrices)
def test_round_trip(A):
    np.testing.assert_array_equal(parse_matrix(format_matrix(A)), A)


@common
@given(st.integers(1, 6), seeds)
def test_volume_matches_determinant(n, seed):
    M = np.random.default_rng(seed).standard_normal((n, n))
    v = volume(M)
    assert not v.is_zero
    assert math.isclose(v.log_value, np.linalg.slogdet(M)[1], rel_tol=1e-9, abs_tol=1e-9)


@common
@given(st.integers(1, 6), st.integers(1, 6), seeds)
def test_pinv_volume_reciprocal(k, l, seed):
    M = np.random.default_rng(seed).standard_normal((k, l))
    r = min(k, l)
    prod = projective_volume(M, r) * projective_volume(pseudo_inverse(M), r)
    assert abs(prod.log_value) <= 1e-8


@common
@given(st.lists(st.integers(0, 50), unique=True))
def test_index_sets_are_sorted(ix):
    out = index_set(ix)
    assert list(out) == sorted(ix)


@common
@given(shapes, seeds, st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6)), max_size=30))
def test_access_count_is_distinct_cells(shape, seed, cells):
    A = np.random.default_rng(seed).standard_normal(shape)
    W = EntryOracle.from_dense(A)
    cells = [(i % shape[0], j % shape[1]) for i, j in cells]
    for i, j in cells:
        assert W(i, j) == A[i, j]
    assert W.access_count == len(set(cells)) <= A.size
    assert W.accessed() == set(cells)


@common
@given(st.integers(2, 9), st.integers(2, 9), st.integers(1, 3), seeds)
def test_cur_exact_on_nonsingular_generator(m, n, r, seed):
    rng = np.random.default_rng(seed)
    r = min(r, m, n)
    A = rng.standard_normal((m, r)) @ rng.standard_normal((r, n))
    rows = sorted(rng.choice(m, r, replace=False).tolist())
    cols = sorted(rng.choice(n, r, replace=False).tolist())
    G = A[np.ix_(rows, cols)]
    s = singular_values(G)
    if s[-1] < 1e-3 * s[0]:
        return
    cur = build_cur(EntryOracle.from_dense(A), rows, cols, r)
    assert np.max(np.abs(A - cur.to_dense())) <= 1e-8 * np.max(np.abs(A)) / (s[-1] / s[0])


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 8), st.integers(1, 3), seeds)
def test_gecp_factorial_squared(n, r, seed):
    rng = np.random.default_rng(seed)
    r = min(r, n)
    B = rng.standard_normal((n, n))
    W = B.T @ B
    I = list(gecp_spsd(EntryOracle.from_dense(W), r).indices)
    best = brute_force_max_volume(W, r, r, principal=True).volume.log_value
    assert volume(W[np.ix_(I, I)]).log_value >= best - 2 * math.lgamma(r + 1) - 1e-9


@settings(max_examples=30, deadline=None)
@given(st.integers(4, 12), st.integers(1, 3), seeds)
def test_spsd_result_is_locally_maximal(n, r, seed):
    rng = np.random.default_rng(seed)
    B = rng.standard_normal((n, n))
    W = B.T @ B
    eps = 0.1
    I = list(spsd_main(EntryOracle.from_dense(W), SpsdConfig(r=r, eps=eps)).indices)
    v = volume(W[np.ix_(I, I)]).log_value
    for i_out in I:
        for j in set(range(n)) - set(I):
            J = sorted(set(I) - {i_out} | {j})
            assert volume(W[np.ix_(J, J)]).log_value <= v + math.log1p(eps) + 1e-9
