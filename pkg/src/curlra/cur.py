"""CUR factors and the canonical nucleus."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .access import EntryOracle, IndexSet, index_set
from .linalg import truncated_pseudo_inverse


@dataclass(frozen=True)
class CurFactors:
    """``W ~ C U R`` with ``C = W[:, col_set]`` and ``R = W[row_set, :]``."""

    row_set: IndexSet
    col_set: IndexSet
    C: np.ndarray
    U: np.ndarray
    R: np.ndarray
    r: int

    def __post_init__(self):
        m, l = self.C.shape
        k, n = self.R.shape
        if self.U.shape != (l, k):
            raise ValueError(f"nucleus shape {self.U.shape} != {(l, k)}")
        if len(self.row_set) != k or len(self.col_set) != l:
            raise ValueError("index sets do not match factor shapes")
        if k and l and not (0 < self.r <= min(k, l)):
            raise ValueError(f"target rank {self.r} outside (0, {min(k, l)}]")

    @property
    def shape(self) -> tuple[int, int]:
        return self.C.shape[0], self.R.shape[1]

    def left(self) -> np.ndarray:
        """``C U``, the left generator of the product."""
        return self.C @ self.U

    def entries(self, rows, cols) -> np.ndarray:
        """``(C U R)[rows[t], cols[t]]`` without forming the product."""
        rows = np.asarray(rows, dtype=np.intp)
        cols = np.asarray(cols, dtype=np.intp)
        CU = self.C[rows] @ self.U
        return np.einsum("ij,ji->i", CU, self.R[:, cols])

    def to_dense(self) -> np.ndarray:
        return self.left() @ self.R


def canonical_nucleus(generator: np.ndarray, r: int) -> np.ndarray:
    """Pseudo-inverse of the rank-``r`` truncation of the generator."""
    return truncated_pseudo_inverse(generator, r)


def build_cur(W: EntryOracle, rows, cols, r: int) -> CurFactors:
    """Canonical CUR on the generator ``W[rows, cols]``.

    Reads ``|rows| * n + m * |cols|`` cells of ``W``.
    """
    rows = index_set(rows, W.m)
    cols = index_set(cols, W.n)
    C = W.cols(cols)
    R = W.rows(rows)
    G = C[list(rows)]
    return CurFactors(rows, cols, C, canonical_nucleus(G, r), R, r)


def zero_cur(shape: tuple[int, int]) -> CurFactors:
    """The empty CUR, standing for the zero approximation."""
    m, n = shape
    return CurFactors((), (), np.zeros((m, 0)), np.zeros((0, 0)), np.zeros((0, n)), 0)


def cheb_error(W: EntryOracle, cur: CurFactors, chunk: int = 512) -> float:
    """Exact ``||W - CUR||_C`` by full traversal.

    Verification only: reads every entry and is excluded from the access
    count.
    """
    if W.shape != cur.shape:
        raise ValueError(f"shape mismatch {W.shape} vs {cur.shape}")
    A = W.to_dense(count=False)
    CU = cur.left()
    worst = 0.0
    for start in range(0, W.m, chunk):
        block = A[start:start + chunk] - CU[start:start + chunk] @ cur.R
        if block.size:
            worst = max(worst, float(np.max(np.abs(block))))
    return worst
