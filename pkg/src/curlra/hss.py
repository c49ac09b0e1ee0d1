"""HSS compression by cross-approximation and fast matrix-vector products.

The matrix is split by a binary tree of contiguous index ranges.  Leaves
keep their dense diagonal blocks; at every internal node the two
off-diagonal sibling blocks are compressed to ``F @ H`` with ``F = C U``
and ``H = R`` from a C-A CUR, with the block rank found by binary search.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .access import EntryOracle
from .cross import CaConfig, DegenerateStripError, ca_iterations, select_in_strip
from .cur import CurFactors, canonical_nucleus
from .linalg import EPS

log = logging.getLogger(__name__)

DENSE_LIMIT = 4096
REPORT_COLUMNS = ["input", "loops", "hss_rank", "spec_mean", "spec_std",
                  "cheb_mean", "cheb_std", "accesses", "trials"]


def cauchy_oracle(x_nodes=None, y_nodes=None, n: int | None = None) -> EntryOracle:
    """Oracle for ``w_ij = 1 / (x_i - y_j)``.

    With only ``n`` given the nodes are ``x_i = i + 1`` and ``y_j = j + 1.5``.
    """
    if x_nodes is None:
        if n is None:
            raise ValueError("give nodes or n")
        x_nodes = np.arange(n) + 1.0
        y_nodes = np.arange(n) + 1.5
    x = np.asarray(x_nodes, dtype=np.float64)
    y = np.asarray(y_nodes, dtype=np.float64)
    if x.ndim != 1 or y.ndim != 1:
        raise ValueError("nodes must be vectors")
    gap = np.abs(x[:, None] - y[None, :])
    if np.any(gap == 0.0):
        raise ValueError("coincident x and y nodes")
    return EntryOracle((x.size, y.size), lambda I, J: 1.0 / (x[I] - y[J]))


@dataclass(frozen=True)
class OffDiagonalBlock:
    rows: range
    cols: range
    F: np.ndarray
    H: np.ndarray
    flagged: bool = False

    @property
    def rank(self) -> int:
        return self.F.shape[1]


@dataclass(frozen=True)
class HssTree:
    n: int
    leaf_size: int
    xi: float
    max_rank: int
    leaves: tuple[tuple[range, np.ndarray], ...]
    blocks: tuple[OffDiagonalBlock, ...]
    levels: int
    access_count: int = 0

    @property
    def hss_rank(self) -> int:
        return max((b.rank for b in self.blocks), default=0)

    @property
    def flagged(self) -> bool:
        return any(b.flagged for b in self.blocks)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.n, self.n))
        for rng, D in self.leaves:
            out[rng.start:rng.stop, rng.start:rng.stop] = D
        for b in self.blocks:
            out[b.rows.start:b.rows.stop, b.cols.start:b.cols.stop] = b.F @ b.H
        return out


def partition(n: int, leaf_size: int) -> tuple[list[range], list[tuple[range, range]], int]:
    """Leaves, sibling pairs and depth of the halving tree over ``range(n)``."""
    if leaf_size < 1:
        raise ValueError("leaf_size must be positive")
    leaves: list[range] = []
    pairs: list[tuple[range, range]] = []
    depth = 0

    def split(rng: range, level: int):
        nonlocal depth
        depth = max(depth, level)
        if len(rng) <= leaf_size:
            leaves.append(rng)
            return
        mid = rng.start + len(rng) // 2
        left, right = range(rng.start, mid), range(mid, rng.stop)
        pairs.append((left, right))
        split(left, level + 1)
        split(right, level + 1)

    split(range(n), 0)
    return leaves, pairs, depth


def _power_norm(cur: CurFactors, seed: int, iters: int = 10) -> float:
    """Spectral norm of ``C U R`` by power iteration on the factors."""
    CU = cur.left()
    R = cur.R
    if CU.size == 0 or R.size == 0:
        return 0.0
    x = np.random.default_rng(seed).standard_normal(R.shape[1])
    est = 0.0
    for _ in range(iters):
        y = CU @ (R @ x)
        nx = np.linalg.norm(x)
        ny = np.linalg.norm(y)
        if nx == 0.0 or ny == 0.0:
            return 0.0
        est = ny / nx
        x = R.T @ (CU.T @ y)
    return est


class _Cross:
    """Residual checks for sub-generators of one rank-``r`` C-A cross.

    The error estimate of a candidate is the largest of three Frobenius
    norms: its residual on the cross, on the validation rows and columns,
    and a scaled estimate from sampled cells.
    """

    def __init__(self, W: EntryOracle, cur: CurFactors, check_rows, check_cols,
                 rows, cols, vals):
        self.cur = cur
        self.I = list(cur.row_set)
        self.J = list(cur.col_set)
        self.G = cur.C[self.I]
        self.check_rows = list(check_rows)
        self.check_cols = list(check_cols)
        self.VR = W.rows(self.check_rows)
        self.VC = W.cols(self.check_cols)
        self.rows, self.cols, self.vals = rows, cols, vals
        self.hw = W.shape[0] * W.shape[1]
        self._cache: dict[int, tuple | None] = {}

    def estimate(self, F: np.ndarray, H: np.ndarray) -> float:
        C, R = self.cur.C, self.cur.R
        res_s = self.vals - np.einsum("ij,ji->i", F[self.rows], H[:, self.cols])
        return max(np.linalg.norm(C - F @ H[:, self.J]),
                   np.linalg.norm(R - F[self.I] @ H),
                   np.linalg.norm(self.VR - F[self.check_rows] @ H),
                   np.linalg.norm(self.VC - F @ H[:, self.check_cols]),
                   math.sqrt(self.hw * float(np.mean(res_s * res_s))))

    def factors(self, rp: int):
        """``(error estimate, F, H, columns)`` of the rank-``rp`` sub-generator."""
        if rp in self._cache:
            return self._cache[rp]
        C, R, G = self.cur.C, self.cur.R, self.G
        r = G.shape[0]
        try:
            jc = list(select_in_strip(G, r, rp, rp, axis=1).indices) if rp < r else list(range(r))
            ir = list(select_in_strip(G[:, jc], rp, rp, rp, axis=0).indices) if rp < r \
                else list(range(r))
        except DegenerateStripError:
            self._cache[rp] = None
            return None
        F = C[:, jc] @ canonical_nucleus(G[np.ix_(ir, jc)], rp)
        H = R[ir]
        est = self.estimate(F, H)
        self._cache[rp] = (est, F, H, [self.J[j] for j in jc])
        return self._cache[rp]


class _PivotSweep:
    """Cross approximation with partial pivoting, used to seed C-A.

    Each step reads one row and one column of the block; the next row is
    the largest entry of the newest residual column.  The pivot columns
    span the block's dominant column space far better than random columns
    do on smooth kernels, whose random strips are numerically rank
    deficient.
    """

    def __init__(self, W: EntryOracle, first_rows):
        self.W = W
        h, w = W.shape
        self.U = np.zeros((h, 0))
        self.V = np.zeros((0, w))
        self.rows: list[int] = []
        self.cols: list[int] = []
        self.queue = [int(i) for i in first_rows]
        self.next_row: int | None = None
        self.scale = 0.0
        self.approx2 = 0.0
        self.exhausted = False
        self.last = math.inf

    def _take_row(self) -> int | None:
        if self.next_row is not None and self.next_row not in self.rows:
            i, self.next_row = self.next_row, None
            return i
        while self.queue:
            i = self.queue.pop(0)
            if i not in self.rows:
                return i
        return None

    def step(self) -> bool:
        """Add one pivot; ``False`` once no nonzero residual row is found."""
        W = self.W
        tries = 0
        while True:
            i = self._take_row()
            if i is None or tries > 4:
                self.exhausted = True
                return False
            tries += 1
            row = W.rows([i])[0] - self.U[i] @ self.V
            self.scale = max(self.scale, float(np.max(np.abs(row + self.U[i] @ self.V))))
            row[self.cols] = 0.0
            j = int(np.argmax(np.abs(row)))
            if abs(row[j]) > max(W.shape) * EPS * self.scale:
                break
            self.rows.append(i)
        col = W.cols([j])[:, 0] - self.U @ self.V[:, j]
        u = col / row[j]
        # update ||U V||_F^2 incrementally
        cross = 2.0 * float((self.U.T @ u) @ (self.V @ row))
        uu, vv = float(u @ u), float(row @ row)
        self.approx2 = max(self.approx2 + cross + uu * vv, 0.0)
        self.last = math.sqrt(uu * vv)
        self.U = np.column_stack([self.U, u])
        self.V = np.vstack([self.V, row])
        self.rows.append(i)
        self.cols.append(j)
        cand = np.abs(u)
        cand[self.rows] = -1.0
        self.next_row = int(np.argmax(cand))
        return True

    def sweep(self, xi: float, limit: int) -> None:
        """Add pivots until one falls to ``xi`` relative size or ``limit``."""
        while len(self.cols) < limit and not self.exhausted:
            if not self.step():
                return
            if self.last <= xi * math.sqrt(self.approx2):
                return


def _compress_block(W: EntryOracle, xi: float, max_rank: int, loops: int, seed: int,
                    samples: int) -> tuple[np.ndarray, np.ndarray, bool]:
    """Generators ``(F, H)`` of one off-diagonal block and a warning flag.

    A partial-pivoting sweep runs until a pivot falls to ``xi`` relative
    size; that last pivot is held out and one C-A loop runs at rank ``r``
    from the other pivot columns.  The block rank is the smallest
    ``rp <= r`` (binary search) whose sub-generator CUR has estimated
    residual at most ``xi`` times the block norm estimate, validated on the
    sweep's rows and columns and on sampled cells.  If even ``rp = r``
    fails, the sweep adds pivots and the search repeats, up to
    ``max_rank``.  Finally ``loops`` C-A loops refine the chosen rank.
    """
    h, w = W.shape
    hi = min(max_rank, h, w)
    seeds = np.random.SeedSequence(seed).spawn(2)
    ca_seed = int(seeds[0].generate_state(1)[0])
    rng = np.random.default_rng(seeds[1])
    rows = rng.integers(0, h, size=samples)
    cols = rng.integers(0, w, size=samples)
    vals = W.cells(rows, cols)
    sweep = _PivotSweep(W, rows[np.argsort(-np.abs(vals), kind="stable")])
    sweep.sweep(xi, hi + 1)
    best = None
    while True:
        r = min(len(sweep.cols) - (0 if sweep.exhausted else 1), hi)
        if r <= 0:
            if best is None:
                return np.zeros((h, 0)), np.zeros((0, w)), False
            break
        cfg = CaConfig(r=r, max_iters=2, tau=0.0, seed=ca_seed, verify_samples=4)
        try:
            cur = ca_iterations(W, cfg, initial_cols=sweep.cols[:r], retries=0).cur
        except DegenerateStripError:
            # trailing pivots are below working precision
            hi = r - 1
            continue
        cross = _Cross(W, cur, sweep.rows, sweep.cols, rows, cols, vals)
        tol = xi * _power_norm(cur, ca_seed)

        def passes(rp: int) -> bool:
            got = cross.factors(rp)
            return got is not None and got[0] <= tol

        lo, top = 1, r
        while lo < top:
            mid = (lo + top) // 2
            if passes(mid):
                top = mid
            else:
                lo = mid + 1
        got = cross.factors(lo)
        if got is not None and (best is None or got[0] / tol < best[0]):
            best = (got[0] / tol, *got[1:], cross, tol)
        if best is not None and best[0] <= 1.0:
            break
        if r >= hi or sweep.exhausted:
            break
        for _ in range(2):
            if len(sweep.cols) > hi or not sweep.step():
                break
    flagged = best is None or best[0] > 1.0
    if best is not None and best[1].shape[1] > 0:
        best = _refine(W, best, loops, ca_seed)
        flagged = best[0] > 1.0
    if best is None:
        return np.zeros((h, 0)), np.zeros((0, w)), True
    if flagged:
        log.warning("block %s: rank %d misses xi=%g", W.shape, best[1].shape[1], xi)
    return best[1], best[2], flagged


def _refine(W: EntryOracle, best, loops: int, seed: int):
    """``loops`` single C-A loops at the chosen rank, started from the chosen
    columns; the iterate with the smallest validated error is kept, so more
    loops never raise the estimate."""
    est, F, H, cols, cross, tol = best
    for _ in range(loops):
        cfg = CaConfig(r=F.shape[1], max_iters=2, tau=0.0, seed=seed, verify_samples=4)
        try:
            cur = ca_iterations(W, cfg, initial_cols=cols, retries=0).cur
        except DegenerateStripError:
            break
        cols = list(cur.col_set)
        F2 = cur.left()
        est2 = cross.estimate(F2, cur.R) / tol
        if est2 < est:
            est, F, H = est2, F2, cur.R
    return est, F, H, cols, cross, tol


def build_hss(W: EntryOracle, leaf_size: int, xi: float, max_rank: int,
              ca_loops: int = 1, seed: int = 0, samples: int = 64) -> HssTree:
    """Compress a square oracle into an HSS tree.

    Diagonal leaf blocks are read densely; each sibling block pair at every
    level is compressed independently by :func:`_compress_block`.
    """
    if W.m != W.n:
        raise ValueError("HSS input must be square")
    if xi <= 0:
        raise ValueError("xi must be positive")
    if max_rank < 1 or ca_loops < 1:
        raise ValueError("max_rank and ca_loops must be positive")
    leaves, pairs, depth = partition(W.n, leaf_size)
    diag = tuple((rng, W.block(rng, rng)) for rng in leaves)
    block_seeds = np.random.SeedSequence(seed).spawn(2 * len(pairs))
    blocks = []
    t = 0
    for left, right in pairs:
        for rows, cols in ((left, right), (right, left)):
            sub = W.view(rows, cols)
            bseed = int(block_seeds[t].generate_state(1)[0])
            t += 1
            F, H, flag = _compress_block(sub, xi, max_rank, ca_loops, bseed, samples)
            blocks.append(OffDiagonalBlock(rows, cols, F, H, flag))
    return HssTree(W.n, leaf_size, xi, max_rank, diag, tuple(blocks), depth,
                   W.access_count)


def hss_matvec_counted(tree: HssTree, v) -> tuple[np.ndarray, int]:
    """``tree @ v`` together with the number of flops spent."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (tree.n,):
        raise ValueError(f"expected a vector of length {tree.n}")
    y = np.zeros(tree.n)
    flops = 0
    for rng, D in tree.leaves:
        y[rng.start:rng.stop] += D @ v[rng.start:rng.stop]
        flops += 2 * D.size
    for b in tree.blocks:
        if b.rank == 0:
            continue
        y[b.rows.start:b.rows.stop] += b.F @ (b.H @ v[b.cols.start:b.cols.stop])
        flops += 2 * b.rank * (len(b.rows) + len(b.cols))
    return y, flops


def hss_matvec(tree: HssTree, v) -> np.ndarray:
    return hss_matvec_counted(tree, v)[0]


@dataclass
class BenchRow:
    input: str
    loops: int
    hss_rank: int
    spec_mean: float
    spec_std: float
    cheb_mean: float
    cheb_std: float
    accesses: float
    trials: int
    spec_errors: list[float] = field(default_factory=list, repr=False)
    cheb_errors: list[float] = field(default_factory=list, repr=False)

    def csv_fields(self) -> list[str]:
        return [self.input, str(self.loops), str(self.hss_rank),
                f"{self.spec_mean:.6e}", f"{self.spec_std:.6e}",
                f"{self.cheb_mean:.6e}", f"{self.cheb_std:.6e}",
                f"{self.accesses:.1f}", str(self.trials)]


@dataclass
class HssBenchReport:
    rows: list[BenchRow]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        for row in self.rows:
            writer.writerow(row.csv_fields())
        return buf.getvalue()


def bench_matrix(kind: str, n: int, rng: np.random.Generator, rank: int = 3) -> EntryOracle:
    """Test inputs: perturbed Cauchy nodes, or an exact rank-``rank`` product."""
    if kind == "cauchy":
        x = np.arange(n) + 1.0 + rng.uniform(-0.1, 0.1, n)
        y = np.arange(n) + 1.5 + rng.uniform(-0.1, 0.1, n)
        return cauchy_oracle(x, y)
    if kind == "rank":
        A = rng.standard_normal((n, rank))
        B = rng.standard_normal((n, rank))
        return EntryOracle((n, n), lambda I, J: np.sum(A[I] * B[J], axis=-1))
    raise ValueError(f"unknown benchmark input {kind!r}")


def hss_benchmark(sizes, ranks, loops=(1, 5), trials: int = 20, seed: int = 0, *,
                  kind: str = "cauchy", leaf_size: int = 32, xi: float = 1e-8,
                  samples: int = 64) -> HssBenchReport:
    """Relative spectral and Chebyshev errors of HSS builds against dense assembly.

    For every ``(n, max_rank)`` in ``sizes x ranks`` and every loop count the
    same ``trials`` seeded inputs are compressed; errors are normalized by
    the same norm of the dense input.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    rows = []
    for n in sizes:
        if n > DENSE_LIMIT:
            raise ValueError(f"dense assembly refused above n={DENSE_LIMIT}")
        for max_rank in ranks:
            for nloops in loops:
                spec, cheb, acc, hrank = [], [], [], 0
                for t in range(trials):
                    tseed = np.random.SeedSequence([seed, n, t])
                    rng = np.random.default_rng(tseed)
                    W = bench_matrix(kind, n, rng)
                    tree = build_hss(W, leaf_size, xi, max_rank, nloops,
                                     int(tseed.generate_state(1)[0]), samples)
                    dense = W.to_dense()
                    err = dense - tree.to_dense()
                    spec.append(np.linalg.norm(err, 2) / np.linalg.norm(dense, 2))
                    cheb.append(np.max(np.abs(err)) / np.max(np.abs(dense)))
                    acc.append(tree.access_count)
                    hrank = max(hrank, tree.hss_rank)
                rows.append(BenchRow(f"{kind}-{n}", nloops, hrank,
                                     float(np.mean(spec)), float(np.std(spec)),
                                     float(np.mean(cheb)), float(np.std(cheb)),
                                     float(np.mean(acc)), trials, spec, cheb))
    return HssBenchReport(rows)
