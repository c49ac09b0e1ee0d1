"""Dense matrix substrate: norms, compact SVD, pseudo-inverse, truncation,
numerical rank, and volumes kept in log-space.

Matrices are plain 2-d ``float64`` numpy arrays.  Volume products of many
singular values over/underflow quickly, so every volume is carried as a
:class:`LogVolume` (sum of logarithms plus an explicit zero flag).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

EPS = np.finfo(np.float64).eps


class LinalgError(RuntimeError):
    """Raised when a dense factorization fails to converge."""


def as_matrix(M) -> np.ndarray:
    """Return ``M`` as a finite 2-d float64 array (no copy when possible)."""
    A = np.asarray(M, dtype=np.float64)
    if A.ndim == 1:
        A = A.reshape(1, -1)
    if A.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def zero_threshold(shape, sigma_max: float) -> float:
    """Singular values at or below this count as zero."""
    return max(shape) * EPS * sigma_max


def singular_values(M) -> np.ndarray:
    A = as_matrix(M)
    if A.size == 0:
        return np.zeros(0)
    try:
        return scipy.linalg.svdvals(A, check_finite=False)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise LinalgError(f"SVD did not converge: {exc}") from exc


@dataclass(frozen=True)
class Svd:
    """Compact SVD ``M = S diag(sigma) T^T`` with the zero singular values cut."""

    S: np.ndarray
    sigma: np.ndarray
    T: np.ndarray

    @property
    def rank(self) -> int:
        return self.sigma.size

    def reconstruct(self) -> np.ndarray:
        return (self.S * self.sigma) @ self.T.T


def svd(M) -> Svd:
    """Compact SVD of ``M``.

    Singular values at or below ``max(m, n) * eps * sigma_1`` are dropped, so
    ``svd(M).rank`` is the numerical rank at machine precision.
    """
    A = as_matrix(M)
    m, n = A.shape
    if A.size == 0:
        return Svd(np.zeros((m, 0)), np.zeros(0), np.zeros((n, 0)))
    try:
        S, s, Vt = scipy.linalg.svd(A, full_matrices=False, check_finite=False)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
        try:
            S, s, Vt = scipy.linalg.svd(
                A, full_matrices=False, check_finite=False, lapack_driver="gesvd"
            )
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
            raise LinalgError(f"SVD did not converge: {exc}") from exc
    if s.size == 0 or s[0] == 0.0:
        return Svd(np.zeros((m, 0)), np.zeros(0), np.zeros((n, 0)))
    rho = int(np.count_nonzero(s > zero_threshold(A.shape, s[0])))
    return Svd(S[:, :rho], s[:rho].copy(), Vt[:rho].T)


def norms(M) -> tuple[float, float, float]:
    """Spectral, Frobenius and Chebyshev (max-modulus) norms."""
    A = as_matrix(M)
    if A.size == 0:
        return 0.0, 0.0, 0.0
    s = singular_values(A)
    cheb = float(np.max(np.abs(A)))
    if cheb == 0.0:
        return 0.0, 0.0, 0.0
    # scale first so squares neither underflow nor overflow
    return float(s[0]), cheb * float(np.linalg.norm(A / cheb)), cheb


def pseudo_inverse(M) -> np.ndarray:
    A = as_matrix(M)
    f = svd(A)
    return (f.T / f.sigma) @ f.S.T


def rank_truncation(M, r: int) -> np.ndarray:
    """Keep the ``r`` largest singular triplets of ``M``."""
    if r < 1:
        raise ValueError("r must be positive")
    A = as_matrix(M)
    f = svd(A)
    if r >= f.rank:
        return A.copy()
    return (f.S[:, :r] * f.sigma[:r]) @ f.T[:, :r].T


def truncated_pseudo_inverse(M, r: int) -> np.ndarray:
    """Pseudo-inverse of the rank-``r`` truncation, computed from one SVD."""
    f = svd(M)
    k = min(r, f.rank)
    return (f.T[:, :k] / f.sigma[:k]) @ f.S[:, :k].T


def numerical_rank(M, eps: float) -> int:
    """Smallest ``r`` with ``sigma_{r+1} <= eps * sigma_1``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    s = singular_values(M)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > eps * s[0]))


@dataclass(frozen=True)
class LogVolume:
    """A volume ``prod sigma_j`` stored as ``log_value`` with a zero flag."""

    is_zero: bool
    log_value: float

    @classmethod
    def from_singular_values(cls, s: np.ndarray, count: int, shape) -> "LogVolume":
        if count == 0:
            return cls(False, 0.0)
        if s.size < count or s[0] == 0.0:
            return cls(True, -math.inf)
        top = s[:count]
        if top[-1] <= zero_threshold(shape, s[0]):
            with np.errstate(divide="ignore"):
                return cls(True, float(np.sum(np.log(top))))
        return cls(False, float(np.sum(np.log(top))))

    @property
    def value(self) -> float:
        """The volume itself; may overflow to ``inf`` for large products."""
        if self.is_zero:
            return 0.0
        return math.exp(self.log_value) if self.log_value < 709.0 else math.inf

    def log_ratio(self, other: "LogVolume") -> float:
        """``log(self / other)``; zero volumes map to ``-inf``/``+inf``."""
        if self.is_zero and other.is_zero:
            return math.nan
        if self.is_zero:
            return -math.inf
        if other.is_zero:
            return math.inf
        return self.log_value - other.log_value

    def exceeds(self, other: "LogVolume", eps: float) -> bool:
        """True when ``self > (1 + eps) * other``."""
        ratio = self.log_ratio(other)
        return not math.isnan(ratio) and ratio > math.log1p(eps)

    def __mul__(self, other: "LogVolume") -> "LogVolume":
        return LogVolume(self.is_zero or other.is_zero, self.log_value + other.log_value)


def volume(M) -> LogVolume:
    """Product of the ``min(k, l)`` singular values of ``M``."""
    A = as_matrix(M)
    return LogVolume.from_singular_values(singular_values(A), min(A.shape), A.shape)


def projective_volume(M, r: int) -> LogVolume:
    """Product of the ``r`` largest singular values of ``M``."""
    A = as_matrix(M)
    if not 1 <= r <= min(A.shape):
        raise ValueError(f"r={r} outside [1, {min(A.shape)}] for shape {A.shape}")
    return LogVolume.from_singular_values(singular_values(A), r, A.shape)


def log_projective_volumes(stack: np.ndarray, r: int) -> np.ndarray:
    """Batched ``log v_{2,r}`` over a stack of equally shaped matrices.

    Entries whose ``r``-th singular value falls under the zero threshold come
    back as ``-inf``.
    """
    stack = np.asarray(stack, dtype=np.float64)
    if stack.shape[0] == 0:
        return np.zeros(0)
    shape = stack.shape[1:]
    s = np.linalg.svd(stack, compute_uv=False)
    top = s[:, :r]
    zero = (s[:, 0] == 0.0) | (top[:, -1] <= max(shape) * EPS * s[:, 0])
    with np.errstate(divide="ignore"):
        out = np.sum(np.log(top), axis=1)
    out[zero] = -np.inf
    return out
