"""Cross-approximation (C-A) iterations over an entry oracle.

Each step takes a strip of the input (a few rows or a few columns, all of
their entries), picks a submatrix of locally maximal volume inside it, and
hands the chosen index set to the next step in the other direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .access import EntryOracle, IndexSet, index_set
from .cur import CurFactors, build_cur
from .linalg import (
    EPS,
    log_projective_volumes,
    numerical_rank,
    projective_volume,
)

DELTA = 1e-3
MAX_SWAPS = 10_000


class DegenerateStripError(ValueError):
    """The strip has zero r-projective volume, so no generator can be found."""


class RankMismatchError(ValueError):
    pass


def _initial_columns(A: np.ndarray, s: int) -> np.ndarray:
    _, _, piv = scipy.linalg.qr(A, mode="economic", pivoting=True, check_finite=False)
    if piv.size < s:
        # economic QR of a wide-short matrix stops pivoting after min(m, n)
        rest = np.setdiff1d(np.arange(A.shape[1]), piv[: A.shape[0]], assume_unique=True)
        norms = np.linalg.norm(A[:, rest], axis=0)
        rest = rest[np.argsort(-norms, kind="stable")]
        piv = np.concatenate([piv[: A.shape[0]], rest])
    return np.array(piv[:s], dtype=np.intp)


def _square_maxvol(A: np.ndarray, J: np.ndarray, delta: float) -> tuple[np.ndarray, np.ndarray]:
    """Classical maxvol on an ``s x q`` matrix of rank ``s``.

    ``B = A_J^{-1} A`` holds the determinant ratios of every single-column
    swap; swap while some ``|B_ij|`` exceeds ``1 + delta``.  Returns the
    columns and the final ``B``.
    """
    J = J.copy()
    for _ in range(MAX_SWAPS):
        lu = scipy.linalg.lu_factor(A[:, J], check_finite=False)
        if np.any(np.diag(lu[0]) == 0.0):
            raise DegenerateStripError("selected square block is singular")
        B = scipy.linalg.lu_solve(lu, A, check_finite=False)
        off = B.copy()
        off[:, J] = 0.0
        i, j = divmod(int(np.argmax(np.abs(off))), B.shape[1])
        if not abs(off[i, j]) > 1.0 + delta:
            return J, B
        J[i] = j
    raise RuntimeError("maxvol swap limit reached")


def _hadamard_factor(B: np.ndarray) -> float:
    """Bound on ``max_S |det B_S|`` over ``s``-column subsets of ``B``."""
    s = B.shape[0]
    col = np.sort(np.linalg.norm(B, axis=0))[::-1][:s]
    row = np.linalg.norm(B, axis=1)
    return float(min(np.prod(col), np.prod(row)))


def _projective_maxvol(A: np.ndarray, J: np.ndarray, r: int, delta: float) -> np.ndarray:
    """Steepest single-column swaps on ``v_{2,r}(A[:, J])``."""
    J = J.copy()
    q = A.shape[1]
    s = J.size
    rk = min(r, A.shape[0], s)
    threshold = math.log1p(delta)
    current = log_projective_volumes(A[:, J][None], rk)[0]
    for _ in range(MAX_SWAPS):
        outside = np.setdiff1d(np.arange(q), J, assume_unique=True)
        if outside.size == 0:
            return J
        cand = np.repeat(J[None, :], s * outside.size, axis=0)
        pos = np.repeat(np.arange(s), outside.size)
        cand[np.arange(cand.shape[0]), pos] = np.tile(outside, s)
        logs = log_projective_volumes(np.moveaxis(A[:, cand], 1, 0), rk)
        best = int(np.argmax(logs))
        if not logs[best] - current > threshold:
            return J
        J = cand[best]
        current = logs[best]
    raise RuntimeError("maxvol swap limit reached")


def _free_axis(shape: tuple[int, int], k: int, l: int) -> int:
    p, q = shape
    if p == k and q != l:
        return 1
    if q == l and p != k:
        return 0
    if p == k and q == l:
        return -1
    return 1 if p <= q else 0


class StripSelection(NamedTuple):
    """Chosen indices of a strip and a certified maximality factor.

    ``factor`` bounds the best achievable ``r``-projective volume over all
    same-size selections in the strip divided by the achieved one (so it is
    at least 1 up to rounding); ``local_factor`` is the single-swap factor.
    """

    indices: IndexSet
    factor: float
    local_factor: float


def select_in_strip(M, k: int, l: int, r: int, *, axis: int | None = None,
                    delta: float = DELTA) -> StripSelection:
    """Select the free dimension of a strip for a locally maximal volume.

    For a ``k x q`` strip this picks ``l`` columns (for a ``p x l`` strip,
    ``k`` rows) so that the selected submatrix has locally
    ``(1 + delta)``-maximal ``r``-projective volume: no single swap of a
    selected index for an unselected one gains more than ``1 + delta``.
    The start is the column-pivoted QR order.

    The strip-wide factor is certified two ways and the smaller is kept:
    ``v_{2,r}(strip) / v_{2,r}(selection)`` (singular values of a column
    subset never exceed those of the strip) and, for square selections, the
    Hadamard bound on the coefficient matrix ``A_J^{-1} A``.

    Parameters
    ----------
    M
        The strip.
    k, l
        Shape of the wanted submatrix.
    r
        Rank of the projective volume; ``r = min(k, l)`` maximizes the
        plain volume.
    axis
        Force selection of columns (1) or rows (0).  By default the free
        dimension is the one not already equal to ``l`` (resp. ``k``), and
        for strips with neither fixed, the longer one.

    Raises
    ------
    DegenerateStripError
        If the strip's ``r``-projective volume is zero.
    """
    A = np.asarray(M, dtype=np.float64)
    if A.ndim != 2:
        raise ValueError("strip must be 2-d")
    if not 1 <= r <= min(k, l):
        raise ValueError(f"r={r} must lie in [1, min(k, l)]")
    if axis is None:
        axis = _free_axis(A.shape, k, l)
        if axis == -1:
            return StripSelection(tuple(range(l)), 1.0, 1.0)
    if axis == 0:
        A, s = A.T, k
    else:
        s = l
    q = A.shape[1]
    if s > q:
        raise ValueError(f"cannot pick {s} of {q} indices")
    rk = min(r, A.shape[0], s)
    whole = projective_volume(A, rk)
    if whole.is_zero:
        raise DegenerateStripError(f"strip of shape {A.shape} has rank below {rk}")
    if s == q:
        return StripSelection(tuple(range(q)), 1.0, 1.0)
    J = _initial_columns(A, s)
    hadamard = math.inf
    if A.shape[0] == s == rk:
        J, B = _square_maxvol(A, J, delta)
        hadamard = _hadamard_factor(B)
    else:
        J = _projective_maxvol(A, J, rk, delta)
    found = projective_volume(A[:, J], rk)
    factor = min(hadamard, math.exp(whole.log_ratio(found)))
    return StripSelection(index_set(J.tolist()), max(factor, 1.0), 1.0 + delta)


def maxvol_submatrix(M, k: int, l: int, r: int, *, axis: int | None = None,
                     delta: float = DELTA) -> IndexSet:
    """Indices chosen by :func:`select_in_strip`."""
    return select_in_strip(M, k, l, r, axis=axis, delta=delta).indices


def projective_to_volume(W, r: int, l: int, orientation: str = "cols",
                         delta: float = DELTA) -> IndexSet:
    """Maximize ``r``-projective volume of ``l`` columns of a rank-``r`` matrix.

    Column-pivoted QR gives ``W P = Q [R'; 0]`` with ``R'`` of ``r`` rows;
    left orthogonal factors do not change volume ratios, so a maximal-volume
    column choice in ``R'`` is one for ``W``.  ``orientation="rows"`` works
    on the transpose and returns rows.
    """
    A = np.asarray(W, dtype=np.float64)
    if orientation == "rows":
        A = A.T
    elif orientation != "cols":
        raise ValueError("orientation must be 'rows' or 'cols'")
    rank = numerical_rank(A, max(A.shape) * EPS * 16)
    if rank != r:
        raise RankMismatchError(f"numerical rank {rank} != {r}")
    if not r <= l <= A.shape[1]:
        raise ValueError(f"need r <= l <= {A.shape[1]}")
    _, Rfac, perm = scipy.linalg.qr(A, mode="economic", pivoting=True, check_finite=False)
    top = Rfac[:r]
    chosen = maxvol_submatrix(top, r, l, r, axis=1, delta=delta)
    return index_set(perm[list(chosen)].tolist())


@dataclass(frozen=True)
class CaConfig:
    """Parameters of the C-A iterations.

    ``max_iters`` counts single C-A steps (one strip each); a loop is a
    vertical step followed by a horizontal one.  ``p`` and ``q`` are the
    numbers of rows and columns kept by the vertical and horizontal steps;
    they default to ``k`` and ``l``.
    """

    r: int
    k: int | None = None
    l: int | None = None
    p: int | None = None
    q: int | None = None
    max_iters: int = 10
    tau: float = 0.0
    seed: int = 0
    verify_samples: int = 100

    def __post_init__(self):
        k, l, p, q = self.dims
        if self.r < 1 or self.r > min(k, l):
            raise ValueError("need 1 <= r <= min(k, l)")
        if p < k or q < l:
            raise ValueError("need k <= p and l <= q")
        if self.tau < 0:
            raise ValueError("tau must be nonnegative")
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if self.verify_samples < 1:
            raise ValueError("verify_samples must be positive")

    @property
    def dims(self) -> tuple[int, int, int, int]:
        k = self.r if self.k is None else self.k
        l = self.r if self.l is None else self.l
        p = k if self.p is None else self.p
        q = l if self.q is None else self.q
        return k, l, p, q


@dataclass(frozen=True)
class CaOutcome:
    status: str
    cur: CurFactors
    steps: int
    estimated_error: float
    frobenius_estimate: float
    access_count: int
    factors: tuple[float, ...] = ()

    @property
    def converged(self) -> bool:
        return self.status == "converged"

    @property
    def loops_executed(self) -> int:
        return (self.steps + 1) // 2


def verify_error(W: EntryOracle, cur: CurFactors, samples: int, seed: int) -> tuple[float, float]:
    """Sampled error estimate of a CUR.

    Draws ``samples`` cells uniformly (with replacement) and returns the
    largest residual modulus, a Chebyshev-norm estimate, and
    ``sqrt(m n * mean residual^2)``, a Frobenius-norm estimate.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    rng = np.random.default_rng(seed)
    m, n = W.shape
    rows = rng.integers(0, m, size=samples)
    cols = rng.integers(0, n, size=samples)
    res = W.cells(rows, cols) - cur.entries(rows, cols)
    cheb = float(np.max(np.abs(res)))
    frob = float(math.sqrt(m * n * float(np.mean(res * res))))
    return cheb, frob


def vertical_step(W: EntryOracle, cols, cfg: CaConfig) -> StripSelection:
    """Pick ``p`` rows of the column strip ``W[:, cols]``."""
    k, l, p, q = cfg.dims
    strip = W.cols(index_set(cols, W.n))
    if p >= W.m:
        return StripSelection(tuple(range(W.m)), 1.0, 1.0)
    return select_in_strip(strip, p, strip.shape[1], min(cfg.r, p, strip.shape[1]), axis=0)


def horizontal_step(W: EntryOracle, rows, cfg: CaConfig) -> StripSelection:
    """Pick ``q`` columns of the row strip ``W[rows, :]``."""
    k, l, p, q = cfg.dims
    strip = W.rows(index_set(rows, W.m))
    if q >= W.n:
        return StripSelection(tuple(range(W.n)), 1.0, 1.0)
    return select_in_strip(strip, strip.shape[0], q, min(cfg.r, q, strip.shape[0]), axis=1)


def _generator_cur(W: EntryOracle, rows: IndexSet, cols: IndexSet, cfg: CaConfig) -> CurFactors:
    k, l, _, _ = cfg.dims
    k, l = min(k, len(rows)), min(l, len(cols))
    rk = min(cfg.r, k, l)
    if len(rows) > k or len(cols) > l:
        G = W.block(rows, cols)
        jc = maxvol_submatrix(G, G.shape[0], l, rk, axis=1) if len(cols) > l \
            else tuple(range(len(cols)))
        ir = maxvol_submatrix(G[:, list(jc)], k, len(jc), rk, axis=0) \
            if len(rows) > k else tuple(range(len(rows)))
        rows = tuple(rows[i] for i in ir)
        cols = tuple(cols[j] for j in jc)
    return build_cur(W, rows, cols, rk)


def _draw_columns(rng: np.random.Generator, n: int, q: int) -> IndexSet:
    return index_set(rng.permutation(n)[:min(q, n)].tolist())


def ca_iterations(W: EntryOracle, cfg: CaConfig, *, initial_cols=None,
                  retries: int = 3) -> CaOutcome:
    """Alternate vertical and horizontal C-A steps until the sampled error
    drops to ``tau`` or ``max_iters`` steps have run.

    Odd steps select rows from the current column strip, even steps select
    columns from the current row strip.  After every step the canonical CUR
    on the current generator is checked by :func:`verify_error`.  The last
    CUR is returned even when the outcome is a failure.

    A degenerate strip restarts from freshly drawn columns, at most
    ``retries`` times, before the error propagates.
    """
    k, l, p, q = cfg.dims
    rng = np.random.default_rng(cfg.seed)
    attempt = 0
    cols = index_set(initial_cols, W.n) if initial_cols is not None else _draw_columns(rng, W.n, q)
    while True:
        try:
            return _run_steps(W, cfg, cols, rng)
        except DegenerateStripError:
            attempt += 1
            if attempt > retries:
                raise
            cols = _draw_columns(rng, W.n, q)


def _run_steps(W: EntryOracle, cfg: CaConfig, cols: IndexSet, rng) -> CaOutcome:
    rows: IndexSet = ()
    cur = None
    cheb = frob = math.inf
    factors: list[float] = []
    step = 0
    for step in range(1, cfg.max_iters + 1):
        if step % 2:
            sel = vertical_step(W, cols, cfg)
            rows = sel.indices
        else:
            sel = horizontal_step(W, rows, cfg)
            cols = sel.indices
        factors.append(sel.factor)
        cur = _generator_cur(W, rows, cols, cfg)
        cheb, frob = verify_error(W, cur, cfg.verify_samples, int(rng.integers(2**63)))
        if cheb <= cfg.tau:
            return CaOutcome("converged", cur, step, cheb, frob, W.access_count, tuple(factors))
    return CaOutcome("failure", cur, step, cheb, frob, W.access_count, tuple(factors))
