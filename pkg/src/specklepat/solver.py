"""Dense regularized linear-algebra kernel: cached QR ridge factorization
with left/right matrix solves, symmetrization, projection onto the PSD cone,
and the PSD square root.

A ridge problem ``argmin ||A M - B||_F^2 + lam ||M||_F^2`` is solved through
the QR factorization of the stacked matrix ``[A; sqrt(lam) I]``; the
factorization is computed once per (A, lam) and reused for any number of
right-hand sides on either side.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg


class RankDeficiencyError(ValueError):
    """Unregularized factorization of a rank-deficient matrix."""


class NotPositiveSemidefiniteError(ValueError):
    """Matrix has eigenvalues below the negative tolerance."""


# negative-eigenvalue tolerance for square roots, relative to the 2-norm
_PSD_TOL = 1e-10


@dataclass(frozen=True)
class RidgeFactorization:
    """Economic QR of the stacked matrix [A; sqrt(lam) I], ready for solves."""

    rows: int
    cols: int
    lam: float
    q1: np.ndarray  # first `rows` rows of the economic Q
    r: np.ndarray  # cols x cols upper triangular


def ridge_factorize(A: np.ndarray, lam: float) -> RidgeFactorization:
    """Factor the lam-augmented design matrix once for reuse across solves."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise ValueError(f"design matrix must be 2D, got {A.ndim}D")
    if not np.all(np.isfinite(A)):
        raise ValueError("design matrix has non-finite entries")
    if not np.isfinite(lam) or lam < 0:
        raise ValueError(f"lambda must be finite and >= 0, got {lam!r}")
    rows, cols = A.shape
    stacked = np.vstack([A, np.sqrt(lam) * np.eye(cols)])
    q, r = scipy.linalg.qr(stacked, mode="economic")
    if lam == 0.0:
        diag = np.abs(np.diag(r))
        tol = max(stacked.shape) * np.finfo(float).eps * (diag.max() if diag.size else 0.0)
        if diag.size == 0 or (diag <= tol).any():
            raise RankDeficiencyError(
                "design matrix is rank-deficient and lambda is 0; regularize or fix the matrix"
            )
    q1 = np.ascontiguousarray(q[:rows])
    return RidgeFactorization(rows=rows, cols=cols, lam=float(lam), q1=q1, r=r)


def ridge_solve_left(F: RidgeFactorization, B: np.ndarray) -> np.ndarray:
    """argmin_M ||A M - B||_F^2 + lam ||M||_F^2 for B with A.rows rows."""
    B = np.asarray(B, dtype=float)
    vector = B.ndim == 1
    if vector:
        B = B[:, None]
    if B.ndim != 2 or B.shape[0] != F.rows:
        raise ValueError(f"right-hand side has shape {B.shape}, expected ({F.rows}, k)")
    X = scipy.linalg.solve_triangular(F.r, F.q1.T @ B)
    return X[:, 0] if vector else X


def ridge_solve_right(F: RidgeFactorization, B: np.ndarray) -> np.ndarray:
    """argmin_M ||M A^T - B||_F^2 + lam ||M||_F^2 for B with A.rows columns.

    Implemented exactly as the transpose of the left solve on B^T, reusing
    the same factorization.
    """
    B = np.asarray(B, dtype=float)
    return ridge_solve_left(F, B.T).T


def symmetrize(M: np.ndarray) -> np.ndarray:
    """(M + M^T) / 2; elementwise identical across the diagonal."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"can only symmetrize square matrices, got shape {M.shape}")
    return (M + M.T) / 2


def _check_symmetric(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    scale = np.max(np.abs(M)) if M.size else 0.0
    if scale > 0 and np.max(np.abs(M - M.T)) > 1e-10 * scale:
        raise ValueError("matrix is not symmetric; apply symmetrize() first")
    return (M + M.T) / 2


def project_psd(M: np.ndarray) -> np.ndarray:
    """Nearest (Frobenius) positive-semidefinite matrix: clip negative eigenvalues."""
    M = _check_symmetric(M)
    w, q = np.linalg.eigh(M)
    out = (q * np.maximum(w, 0.0)) @ q.T
    return (out + out.T) / 2


def projected_sqrt(M: np.ndarray, strict: bool = False) -> np.ndarray:
    """Square root of the PSD projection of M in a single eigendecomposition.

    With ``strict`` the projection is not available as a fallback: eigenvalues
    below ``-1e-10 * ||M||_2`` raise, and only floating-point-noise negatives
    are clipped. Both modes run the identical clip-and-sqrt path, so a
    PSD-safe input produces bit-identical output either way.
    """
    M = _check_symmetric(M)
    w, q = np.linalg.eigh(M)
    norm2 = np.max(np.abs(w)) if w.size else 0.0
    if strict and w.size and w.min() < -_PSD_TOL * norm2:
        raise NotPositiveSemidefiniteError(
            f"minimum eigenvalue {w.min():.3e} is below tolerance {-_PSD_TOL * norm2:.3e}"
        )
    out = (q * np.sqrt(np.maximum(w, 0.0))) @ q.T
    return (out + out.T) / 2


def psd_sqrt(M: np.ndarray) -> np.ndarray:
    """Symmetric PSD square root; raises when M is not PSD beyond tolerance."""
    return projected_sqrt(M, strict=True)
