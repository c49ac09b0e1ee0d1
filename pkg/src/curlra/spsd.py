"""Sublinear CUR for symmetric positive semidefinite matrices.

The pipeline is: diagonal-pivoted Gaussian elimination picks a starting
principal submatrix, single-index swaps then climb to a locally
(1 + eps)-maximal volume (or r-projective volume), and the CUR is built on
that principal generator.  Only the diagonal and the rows/columns of the
chosen indices are ever read.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .access import EntryOracle, IndexSet, index_set
from .cur import CurFactors, canonical_nucleus, zero_cur
from .linalg import EPS, log_projective_volumes, projective_volume, volume


class NotSpsdError(ValueError):
    """A residual diagonal pivot went clearly negative."""


class ZeroVolumeError(ValueError):
    """The current principal generator has zero (projective) volume."""


class SingularGeneratorError(ValueError):
    pass


class MaxUpdatesExceeded(RuntimeError):
    def __init__(self, best: IndexSet, updates: int):
        super().__init__(f"index update cap reached after {updates} swaps")
        self.best = best
        self.updates = updates


class PivotSelection(NamedTuple):
    """Pivots in selection order plus whether the residual ran out early."""

    pivots: tuple[int, ...]
    early_stop: bool

    @property
    def indices(self) -> IndexSet:
        return index_set(self.pivots)


def default_max_updates(r: int, n: int, eps: float) -> int:
    return 4 * max(1, math.ceil(log_update_bound(r, n, eps, projective=True)))


def log_update_bound(r: int, n: int, eps: float, projective: bool) -> float:
    """Bound on accepted index updates, ``log_{1+eps}`` of the start gap.

    ``log_{1+eps}(r!)`` when ``K = r`` and ``log_{1+eps}(2^{r(r-1)} n^r)``
    otherwise.
    """
    if projective:
        a = r * (r - 1) * math.log(2.0) + r * math.log(n)
    else:
        a = math.lgamma(r + 1)
    return a / math.log1p(eps)


@dataclass(frozen=True)
class SpsdConfig:
    r: int
    K: int | None = None
    eps: float = 0.1
    max_updates: int | None = None

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("r must be positive")
        if self.K is not None and self.K < self.r:
            raise ValueError("K must be at least r")
        if self.eps <= 0:
            raise ValueError("eps must be positive")

    @property
    def gen_size(self) -> int:
        return self.r if self.K is None else self.K


@dataclass
class SpsdResult:
    indices: IndexSet
    updates: int = 0
    calls: int = 0
    early_stop: bool = False
    history: list[IndexSet] = field(default_factory=list)


def greedy_column_subset(A, K: int) -> PivotSelection:
    """Greedy column subset selection by largest residual column norm.

    Each pick deflates the residual by the orthogonal projector onto the
    chosen column.  Ties go to the lowest index.  Reads all of ``A``.
    """
    if isinstance(A, EntryOracle):
        M = A.to_dense(count=True)
    else:
        M = np.array(A, dtype=np.float64, copy=True)
    if M.ndim != 2:
        raise ValueError("expected a matrix")
    n = M.shape[1]
    if not 1 <= K <= n:
        raise ValueError(f"K={K} outside [1, {n}]")
    norms2 = np.sum(M * M, axis=0)
    tol = (max(M.shape) * EPS) ** 2 * max(float(norms2.max(initial=0.0)), 0.0)
    picked: list[int] = []
    for _ in range(K):
        i = int(np.argmax(norms2))
        if norms2[i] <= tol:
            return PivotSelection(tuple(picked), True)
        picked.append(i)
        c = M[:, i].copy()
        M -= np.outer(c, (c @ M) / (c @ c))
        norms2 = np.sum(M * M, axis=0)
        norms2[picked] = 0.0
    return PivotSelection(tuple(picked), False)


def gecp_spsd(W: EntryOracle, K: int) -> PivotSelection:
    """Gaussian elimination with diagonal (complete) pivoting on an SPSD oracle.

    The residual is never formed: its diagonal is kept as a vector and the
    pivot columns as a partial Cholesky factor, so the oracle sees the
    diagonal plus ``K`` columns.
    """
    n = W.n
    if W.m != n:
        raise ValueError("SPSD input must be square")
    if not 1 <= K <= n:
        raise ValueError(f"K={K} outside [1, {n}]")
    d = W.diagonal().copy()
    scale = float(np.max(np.abs(d)))
    tol = n * EPS * scale
    L = np.zeros((n, K))
    picked: list[int] = []
    for t in range(K):
        if d.min() < -10 * tol:
            j = int(np.argmin(d))
            raise NotSpsdError(f"residual diagonal entry {j} is {d[j]:.3e}")
        i = int(np.argmax(np.abs(d)))
        if abs(d[i]) <= tol:
            return PivotSelection(tuple(picked), True)
        col = W.cols([i])[:, 0] - L[:, :t] @ L[i, :t]
        L[:, t] = col / math.sqrt(d[i])
        picked.append(i)
        d -= L[:, t] ** 2
        d[picked] = 0.0
    return PivotSelection(tuple(picked), False)


def _metric_rank(size: int, r: int) -> int:
    return min(size, r)


def _principal_volume(W: EntryOracle, indices, r: int):
    G = W.block(indices, indices)
    if len(indices) == r:
        return volume(G)
    return projective_volume(G, r)


def _schur_diagonals(W: EntryOracle, keep: list[int], diag: np.ndarray) -> np.ndarray | None:
    """``w_xx - w_{keep,x}^T W_{keep,keep}^{-1} w_{keep,x}`` for every ``x``.

    These are the ratios ``det W_{keep+x} / det W_{keep}``.  Returns ``None``
    when ``W_{keep,keep}`` is not numerically positive definite.
    """
    if not keep:
        return diag.copy()
    rows = W.rows(keep)
    B = rows[:, keep]
    try:
        factor = scipy.linalg.cho_factor(B, check_finite=False)
    except np.linalg.LinAlgError:
        return None
    Z = scipy.linalg.cho_solve(factor, rows, check_finite=False)
    return diag - np.sum(rows * Z, axis=0)


def _swap_log_ratios(W: EntryOracle, I: IndexSet, pos: int, r: int,
                     diag: np.ndarray | None = None) -> np.ndarray:
    """Log volume ratios for replacing ``I[pos]`` by every index ``j``.

    Entry ``j`` of the result is ``log(vol(W_JJ) / vol(W_II))`` for
    ``J = I - {I[pos]} + {j}``; entries for ``j`` in ``I`` are meaningless.
    """
    n = W.n
    keep = [i for t, i in enumerate(I) if t != pos]
    out_idx = I[pos]
    if len(I) == r:
        if diag is None:
            diag = W.diagonal()
        s = _schur_diagonals(W, keep, diag)
        if s is not None and abs(s[out_idx]) > 0.0:
            with np.errstate(divide="ignore"):
                return np.log(np.abs(s)) - math.log(abs(s[out_idx]))
        return _recomputed_log_ratios(W, I, keep, out_idx, r)
    return _recomputed_log_ratios(W, I, keep, out_idx, r)


def _recomputed_log_ratios(W: EntryOracle, I, keep, out_idx, r) -> np.ndarray:
    n = W.n
    size = len(I)
    rows = W.rows(keep) if keep else np.zeros((0, n))
    diag = W.diagonal()
    base = rows[:, keep]
    stack = np.empty((n, size, size))
    stack[:, :size - 1, :size - 1] = base
    stack[:, :size - 1, size - 1] = rows.T
    stack[:, size - 1, :size - 1] = rows.T
    stack[:, size - 1, size - 1] = diag
    logs = log_projective_volumes(stack, _metric_rank(size, r))
    current = logs[out_idx]
    if current == -np.inf:
        current = _principal_volume(W, list(I), _metric_rank(size, r)).log_value
    with np.errstate(invalid="ignore"):
        return logs - current


def principal_volume_ratio(W: EntryOracle, I, i_out: int, j_in: int, r: int) -> float:
    """``log(vol(W_JJ) / vol(W_II))`` for ``J = I - {i_out} + {j_in}``.

    The metric is the volume when ``|I| = r`` (computed by a Schur complement
    update) and the ``r``-projective volume otherwise (small SVDs).
    """
    I = index_set(I, W.n)
    if i_out not in I:
        raise ValueError(f"{i_out} is not in the index set")
    if j_in == i_out:
        return 0.0
    if j_in in I:
        raise ValueError(f"{j_in} is already in the index set")
    return float(_swap_log_ratios(W, I, I.index(i_out), r)[j_in])


def index_update(W: EntryOracle, I, r: int, eps: float) -> IndexSet:
    """Return the first single-index swap improving the volume by ``1 + eps``.

    Scans the outgoing index ascending, then the incoming one ascending.
    Returns ``I`` unchanged when no such swap exists, which certifies that
    ``W_II`` is locally (1 + eps)-maximal.
    """
    I = index_set(I, W.n)
    if not 1 <= r <= len(I):
        raise ValueError(f"r={r} must lie in [1, |I|={len(I)}]")
    if eps <= 0:
        raise ValueError("eps must be positive")
    if _principal_volume(W, list(I), r).is_zero:
        raise ZeroVolumeError(
            "principal generator has zero volume; restart from gecp_spsd with a larger K")
    threshold = math.log1p(eps)
    members = np.zeros(W.n, dtype=bool)
    members[list(I)] = True
    diag = W.diagonal() if len(I) == r else None
    for pos, i_out in enumerate(I):
        ratios = _swap_log_ratios(W, I, pos, r, diag)
        better = np.flatnonzero(~members & (ratios > threshold))
        if better.size:
            j = int(better[0])
            return index_set([*(i for i in I if i != i_out), j])
    return I


def spsd_main(W: EntryOracle, cfg: SpsdConfig) -> SpsdResult:
    """Pivoted elimination followed by index updates to a fixed point."""
    K = cfg.gen_size
    if K >= W.n:
        raise ValueError(f"generator size K={K} must be below n={W.n}")
    start = gecp_spsd(W, K)
    I = start.indices
    result = SpsdResult(I, early_stop=start.early_stop, history=[I])
    if not I:
        return result
    r = _metric_rank(len(I), cfg.r)
    cap = cfg.max_updates if cfg.max_updates is not None else default_max_updates(cfg.r, W.n, cfg.eps)
    while True:
        J = index_update(W, I, r, cfg.eps)
        result.calls += 1
        if J == I:
            break
        result.updates += 1
        I = J
        result.history.append(I)
        if result.updates > cap:
            raise MaxUpdatesExceeded(I, result.updates)
    result.indices = I
    return result


def build_cur_spsd(W: EntryOracle, I, r: int) -> CurFactors:
    """CUR on the principal generator ``W_II``.

    The nucleus is ``W_II^{-1}`` when ``|I| = r`` and the pseudo-inverse of
    the rank-``r`` truncation of ``W_II`` otherwise.
    """
    I = index_set(I, W.n)
    if not I:
        return zero_cur(W.shape)
    C = W.cols(I)
    R = W.rows(I)
    G = C[list(I)]
    if len(I) <= r:
        if volume(G).is_zero:
            raise SingularGeneratorError(
                "generator is singular; use K > r with the truncated nucleus")
        U = np.linalg.inv(G)
        return CurFactors(I, I, C, U, R, len(I))
    return CurFactors(I, I, C, canonical_nucleus(G, r), R, r)


def spsd_cur(W: EntryOracle, cfg: SpsdConfig) -> tuple[CurFactors, SpsdResult]:
    """Convenience wrapper: :func:`spsd_main` then :func:`build_cur_spsd`."""
    res = spsd_main(W, cfg)
    return build_cur_spsd(W, res.indices, cfg.r), res
