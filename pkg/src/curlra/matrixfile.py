"""Plain-text matrix files.

Line 1 holds ``m n``; each of the next ``m`` lines holds ``n``
whitespace-separated decimals.  Values are written with 17 significant
digits so that reading back reproduces every float exactly.
"""

from __future__ import annotations

import os

import numpy as np


class MatrixFileError(ValueError):
    def __init__(self, path, line: int, why: str):
        super().__init__(f"{path}:{line}: {why}")
        self.line = line


def format_matrix(M) -> str:
    A = np.asarray(M, dtype=np.float64)
    if A.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    lines = [f"{A.shape[0]} {A.shape[1]}"]
    lines.extend(" ".join(f"{x:.17g}" for x in row) for row in A)
    return "\n".join(lines) + "\n"


def write_matrix(path: str | os.PathLike, M) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_matrix(M))


def parse_matrix(text: str, path="<string>") -> np.ndarray:
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise MatrixFileError(path, 1, "missing 'm n' header")
    head = lines[0].split()
    try:
        m, n = (int(t) for t in head)
    except ValueError:
        raise MatrixFileError(path, 1, f"header must be two integers, got {lines[0]!r}") from None
    if m < 1 or n < 1:
        raise MatrixFileError(path, 1, "dimensions must be positive")
    body = lines[1:]
    while body and not body[-1].strip():
        body.pop()
    if len(body) != m:
        # point at the first missing or first surplus line
        raise MatrixFileError(path, min(len(body), m) + 2, f"expected {m} rows, found {len(body)}")
    A = np.empty((m, n))
    for i, ln in enumerate(body):
        toks = ln.split()
        if len(toks) != n:
            raise MatrixFileError(path, i + 2, f"expected {n} values, found {len(toks)}")
        try:
            A[i] = [float(t) for t in toks]
        except ValueError:
            raise MatrixFileError(path, i + 2, "unparseable value") from None
        if not np.all(np.isfinite(A[i])):
            raise MatrixFileError(path, i + 2, "non-finite value")
    return A


def read_matrix(path: str | os.PathLike) -> np.ndarray:
    with open(path, encoding="ascii") as fh:
        return parse_matrix(fh.read(), path)
