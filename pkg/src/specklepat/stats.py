"""Streaming first/second-moment estimation of recordings and the model
covariance they should converge to.

The empirical covariance uses the biased 1/K normalization and is kept as
raw sums so recordings can stream through without being stored; accumulators
from independent workers combine exactly via :meth:`MomentAccumulator.merge`.
"""

from __future__ import annotations

import numpy as np


class MomentAccumulator:
    """Running sum and sum of outer products of fixed-dimension vectors.

    Single-writer: parallelize by accumulating into independent instances
    and merging. ``finalize`` yields ``mu_hat = sum(y) / K`` and
    ``gamma_hat = sum(y y^T) / K - mu_hat mu_hat^T``; the outer-product sum
    is elementwise symmetric, so gamma_hat is symmetric by construction.
    """

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError(f"dimension must be >= 1, got {dim}")
        self.dim = int(dim)
        self.count = 0
        self._sum = np.zeros(dim)
        self._outer = np.zeros((dim, dim))

    def accumulate(self, y: np.ndarray) -> "MomentAccumulator":
        y = np.asarray(y, dtype=float)
        if y.shape != (self.dim,):
            raise ValueError(f"recording has shape {y.shape}, accumulator dim is {self.dim}")
        self.count += 1
        self._sum += y
        self._outer += np.outer(y, y)
        return self

    def merge(self, other: "MomentAccumulator") -> "MomentAccumulator":
        """New accumulator equivalent to both streams (exact sum merge)."""
        if other.dim != self.dim:
            raise ValueError(f"cannot merge accumulators of dims {self.dim} and {other.dim}")
        merged = MomentAccumulator(self.dim)
        merged.count = self.count + other.count
        merged._sum = self._sum + other._sum
        merged._outer = self._outer + other._outer
        return merged

    def finalize(self) -> tuple[np.ndarray, np.ndarray]:
        """(mean, covariance) of everything accumulated so far."""
        if self.count < 1:
            raise ValueError("cannot finalize an empty accumulator")
        mu = self._sum / self.count
        gamma = self._outer / self.count - np.outer(mu, mu)
        return mu, gamma


def _require_symmetric(m: np.ndarray, name: str) -> None:
    scale = np.max(np.abs(m)) if m.size else 0.0
    if np.max(np.abs(m - m.T)) > 1e-10 * max(scale, 1e-300):
        raise ValueError(f"{name} must be symmetric")


def model_covariance(
    A: np.ndarray, rho: np.ndarray, gamma_e: np.ndarray, gamma_eps: np.ndarray
) -> np.ndarray:
    """Exact recording covariance A diag(rho) Gamma_e diag(rho) A^T + Gamma_eps."""
    A = np.asarray(A, dtype=float)
    rho = np.asarray(rho, dtype=float)
    gamma_e = np.asarray(gamma_e, dtype=float)
    gamma_eps = np.asarray(gamma_eps, dtype=float)
    tm, n = A.shape
    if rho.shape != (n,):
        raise ValueError(f"rho has shape {rho.shape}, expected ({n},)")
    if gamma_e.shape != (n, n):
        raise ValueError(f"gamma_e has shape {gamma_e.shape}, expected ({n}, {n})")
    if gamma_eps.shape != (tm, tm):
        raise ValueError(f"gamma_eps has shape {gamma_eps.shape}, expected ({tm}, {tm})")
    _require_symmetric(gamma_e, "gamma_e")
    _require_symmetric(gamma_eps, "gamma_eps")
    b = A * rho
    signal = b @ gamma_e @ b.T
    return (signal + signal.T) / 2 + gamma_eps
