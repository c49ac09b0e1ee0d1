"""Seeded test matrices, dense and oracle-backed.

Generator specs (the ``gen`` grammar)::

    spsd:N:geo:RATIO      Q diag(RATIO^j) Q^T, j = 0..N-1
    spsd:N:rank:R         rank-R SPSD matrix V V^T
    cauchy:N              1 / (x_i - y_j) with x_i = i + 1, y_j = j + 1.5
    rank:M:N:R            product of two Gaussian factors
    delta:M:N:I:J         single unit entry at (I, J)
"""

from __future__ import annotations

import numpy as np

from .access import EntryOracle

GRAMMAR = ("spsd:N:geo:RATIO | spsd:N:rank:R | cauchy:N | rank:M:N:R | "
           "delta:M:N:I:J")


class SpecError(ValueError):
    def __init__(self, spec: str, why: str):
        super().__init__(f"bad generator spec {spec!r}: {why}; expected {GRAMMAR}")


def random_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal matrix (QR of a Gaussian, signs fixed)."""
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    return Q * np.sign(np.diag(R))


def spsd_with_spectrum(spectrum, rng: np.random.Generator) -> np.ndarray:
    lam = np.asarray(spectrum, dtype=np.float64)
    if np.any(lam < 0):
        raise ValueError("SPSD spectrum must be nonnegative")
    Q = random_orthogonal(lam.size, rng)
    W = (Q * lam) @ Q.T
    return (W + W.T) / 2


def spsd_geometric(n: int, ratio: float, rng: np.random.Generator) -> np.ndarray:
    return spsd_with_spectrum(ratio ** np.arange(n, dtype=np.float64), rng)


def spsd_low_rank(n: int, r: int, rng: np.random.Generator) -> np.ndarray:
    V = rng.standard_normal((n, r))
    return V @ V.T


def spsd_low_rank_oracle(n: int, r: int, rng: np.random.Generator,
                         shift: float = 0.0) -> EntryOracle:
    """``V V^T + shift * I`` served entry by entry, never materialized."""
    V = rng.standard_normal((n, r))

    def fn(I, J):
        return np.sum(V[I] * V[J], axis=-1) + shift * (I == J)

    return EntryOracle((n, n), fn)


def low_rank(m: int, n: int, r: int, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal((m, r)) @ rng.standard_normal((r, n))


def delta_matrix(m: int, n: int, i: int, j: int) -> np.ndarray:
    if not (0 <= i < m and 0 <= j < n):
        raise ValueError(f"cell ({i}, {j}) outside {m}x{n}")
    D = np.zeros((m, n))
    D[i, j] = 1.0
    return D


def cauchy_dense(n: int) -> np.ndarray:
    x = np.arange(n, dtype=np.float64) + 1.0
    return 1.0 / (x[:, None] - (x[None, :] + 0.5))


def _ints(spec: str, parts, count: int) -> list[int]:
    if len(parts) != count:
        raise SpecError(spec, f"expected {count} integer fields")
    try:
        vals = [int(p) for p in parts]
    except ValueError:
        raise SpecError(spec, "fields must be integers") from None
    return vals


def parse_spec(spec: str) -> tuple[str, tuple]:
    """``(kind, parameters)`` of a generator spec; raises :class:`SpecError`."""
    parts = spec.strip().split(":")
    kind, rest = parts[0], parts[1:]
    if kind == "spsd":
        if len(rest) != 3:
            raise SpecError(spec, "spsd takes N:geo:RATIO or N:rank:R")
        (n,) = _ints(spec, rest[:1], 1)
        if n < 1:
            raise SpecError(spec, "N must be positive")
        if rest[1] == "geo":
            try:
                ratio = float(rest[2])
            except ValueError:
                raise SpecError(spec, "RATIO must be a number") from None
            if not 0 < ratio <= 1:
                raise SpecError(spec, "RATIO must lie in (0, 1]")
            return "spsd-geo", (n, ratio)
        if rest[1] == "rank":
            (r,) = _ints(spec, rest[2:], 1)
            if not 1 <= r <= n:
                raise SpecError(spec, "R must lie in [1, N]")
            return "spsd-rank", (n, r)
        raise SpecError(spec, f"unknown spectrum {rest[1]!r}")
    if kind == "cauchy":
        (n,) = _ints(spec, rest, 1)
        if n < 1:
            raise SpecError(spec, "N must be positive")
        return "cauchy", (n,)
    if kind == "rank":
        m, n, r = _ints(spec, rest, 3)
        if m < 1 or n < 1 or r < 0:
            raise SpecError(spec, "sizes must be positive and R nonnegative")
        return "rank", (m, n, r)
    if kind == "delta":
        m, n, i, j = _ints(spec, rest, 4)
        if m < 1 or n < 1:
            raise SpecError(spec, "sizes must be positive")
        if not (0 <= i < m and 0 <= j < n):
            raise SpecError(spec, f"cell ({i}, {j}) outside {m}x{n}")
        return "delta", (m, n, i, j)
    raise SpecError(spec, f"unknown kind {kind!r}")


def spec_shape(spec: str) -> tuple[int, int]:
    kind, p = parse_spec(spec)
    if kind in ("rank", "delta"):
        return p[0], p[1]
    return p[0], p[0]


def generate(spec: str, seed: int) -> np.ndarray:
    """Dense matrix for a generator spec."""
    kind, p = parse_spec(spec)
    rng = np.random.default_rng(seed)
    if kind == "spsd-geo":
        return spsd_geometric(p[0], p[1], rng)
    if kind == "spsd-rank":
        return spsd_low_rank(p[0], p[1], rng)
    if kind == "cauchy":
        return cauchy_dense(p[0])
    if kind == "rank":
        return low_rank(*p, rng)
    return delta_matrix(*p)


def oracle_for(spec: str, seed: int) -> EntryOracle:
    """Entry oracle for a generator spec.

    Cauchy, low-rank and delta specs are served entry by entry without
    forming the matrix (entries may differ from :func:`generate` in the
    last bit); the geometric SPSD spec needs its dense eigenbasis.
    """
    kind, p = parse_spec(spec)
    rng = np.random.default_rng(seed)
    if kind == "spsd-rank":
        return spsd_low_rank_oracle(p[0], p[1], rng)
    if kind == "cauchy":
        x = np.arange(p[0], dtype=np.float64) + 1.0
        return EntryOracle((p[0], p[0]), lambda I, J: 1.0 / (x[I] - (x[J] + 0.5)))
    if kind == "rank":
        m, n, r = p
        A = rng.standard_normal((m, r))
        B = rng.standard_normal((r, n)).T.copy()
        return EntryOracle((m, n), lambda I, J: np.sum(A[I] * B[J], axis=-1))
    if kind == "delta":
        m, n, i, j = p
        return EntryOracle((m, n), lambda I, J: ((I == i) & (J == j)).astype(np.float64))
    return EntryOracle.from_dense(generate(spec, seed))
