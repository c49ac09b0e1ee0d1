"""Entry oracles: implicit matrices that count the distinct cells they hand out.

Every sublinear routine in the package reads its input only through an
:class:`EntryOracle`, so ``access_count`` is a faithful certificate of how
many memory cells of the input were touched.
"""

from __future__ import annotations

import threading
from typing import Callable, Iterable, Sequence

import numpy as np

EntryFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]

IndexSet = tuple[int, ...]


def index_set(indices: Iterable[int], bound: int | None = None) -> IndexSet:
    """Validate and sort indices into an :data:`IndexSet`."""
    out = sorted(int(i) for i in indices)
    if len(set(out)) != len(out):
        raise ValueError(f"duplicate indices in {out}")
    if out and out[0] < 0:
        raise ValueError("indices must be nonnegative")
    if bound is not None and out and out[-1] >= bound:
        raise ValueError(f"index {out[-1]} out of range for size {bound}")
    return tuple(out)


class _AccessLog:
    def __init__(self, m: int, n: int):
        self.seen = np.zeros((m, n), dtype=bool)
        self.count = 0
        self.lock = threading.Lock()

    def record(self, rows: np.ndarray, cols: np.ndarray) -> None:
        flat = np.unique(rows * self.seen.shape[1] + cols)
        with self.lock:
            fresh = flat[~self.seen.flat[flat]]
            self.seen.flat[fresh] = True
            self.count += int(fresh.size)


class EntryOracle:
    """Deterministic entry accessor over an ``m x n`` matrix.

    Parameters
    ----------
    shape
        ``(m, n)``.
    fn
        Vectorized entry function: given integer arrays ``I`` and ``J`` of
        equal shape, returns the entries ``w[I, J]`` with that shape.
    """

    def __init__(self, shape: tuple[int, int], fn: EntryFunction, *,
                 _log: _AccessLog | None = None, _offset: tuple[int, int] = (0, 0)):
        m, n = (int(shape[0]), int(shape[1]))
        if m < 1 or n < 1:
            raise ValueError(f"invalid oracle shape {shape}")
        self.shape = (m, n)
        self._fn = fn
        self._log = _log if _log is not None else _AccessLog(m, n)
        self._offset = _offset

    @classmethod
    def from_dense(cls, A) -> "EntryOracle":
        A = np.array(A, dtype=np.float64)
        if A.ndim != 2:
            raise ValueError("expected a 2-d array")
        if not np.all(np.isfinite(A)):
            raise ValueError("matrix has non-finite entries")
        A.setflags(write=False)
        return cls(A.shape, lambda I, J: A[I, J])

    @property
    def m(self) -> int:
        return self.shape[0]

    @property
    def n(self) -> int:
        return self.shape[1]

    @property
    def access_count(self) -> int:
        """Distinct cells read so far (shared with every view of the root)."""
        return self._log.count

    def accessed(self) -> set[tuple[int, int]]:
        """Accessed cells in this oracle's own coordinates."""
        i0, j0 = self._offset
        m, n = self.shape
        rows, cols = np.nonzero(self._log.seen[i0:i0 + m, j0:j0 + n])
        return set(zip(rows.tolist(), cols.tolist()))

    def _fetch(self, I: np.ndarray, J: np.ndarray, count: bool = True) -> np.ndarray:
        I = np.asarray(I, dtype=np.intp)
        J = np.asarray(J, dtype=np.intp)
        if I.size == 0:
            return np.zeros(I.shape)
        m, n = self.shape
        if I.min() < 0 or I.max() >= m or J.min() < 0 or J.max() >= n:
            raise IndexError(f"cell outside oracle of shape {self.shape}")
        i0, j0 = self._offset
        vals = np.asarray(self._fn(I + i0, J + j0), dtype=np.float64).reshape(I.shape)
        if not np.all(np.isfinite(vals)):
            raise ValueError("oracle produced non-finite entries")
        if count:
            self._log.record((I + i0).ravel(), (J + j0).ravel())
        return vals

    def __call__(self, i: int, j: int) -> float:
        return float(self._fetch(np.array([i]), np.array([j]))[0])

    def cells(self, rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
        """Entries at the paired cells ``(rows[t], cols[t])``."""
        return self._fetch(np.asarray(rows), np.asarray(cols))

    def block(self, rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
        """The submatrix ``W[rows, cols]``."""
        rows = np.asarray(rows, dtype=np.intp).reshape(-1)
        cols = np.asarray(cols, dtype=np.intp).reshape(-1)
        if rows.size == 0 or cols.size == 0:
            return np.zeros((rows.size, cols.size))
        I, J = np.meshgrid(rows, cols, indexing="ij")
        return self._fetch(I, J)

    def rows(self, rows: Sequence[int]) -> np.ndarray:
        return self.block(rows, np.arange(self.n))

    def cols(self, cols: Sequence[int]) -> np.ndarray:
        return self.block(np.arange(self.m), cols)

    def diagonal(self) -> np.ndarray:
        d = np.arange(min(self.shape))
        return self._fetch(d, d)

    def to_dense(self, *, count: bool = False) -> np.ndarray:
        """Materialize the whole matrix.

        By default this is a verification path and does not touch the access
        counter.
        """
        I, J = np.meshgrid(np.arange(self.m), np.arange(self.n), indexing="ij")
        return self._fetch(I, J, count=count)

    def view(self, rows: range | slice, cols: range | slice) -> "EntryOracle":
        """A contiguous sub-block sharing this oracle's access counter."""
        rr = range(self.m)[rows] if isinstance(rows, slice) else rows
        cc = range(self.n)[cols] if isinstance(cols, slice) else cols
        if rr.step != 1 or cc.step != 1:
            raise ValueError("views must be contiguous")
        i0, j0 = self._offset
        return EntryOracle((len(rr), len(cc)), self._fn, _log=self._log,
                           _offset=(i0 + rr.start, j0 + cc.start))
