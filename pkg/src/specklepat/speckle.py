"""Correlated speckle illumination with a closed-form intensity covariance,
plus the additive recording-noise model.

The speckle intensity at the grid points is the squared magnitude of a
correlated circular complex Gaussian field, so its covariance is known
exactly: with field covariance ``G_ij = exp(-|x_i - x_j|^2 / (2 ell^2))``
the intensity covariance is ``mu^2 * G_ij^2`` (fully developed speckle:
variance equals squared mean). The reconstruction consumes that analytic
covariance; empirical cross-checks go through
:class:`specklepat.stats.MomentAccumulator`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .geometry import ObjectGrid


@dataclass(frozen=True)
class SpeckleModel:
    """Speckle statistics on a grid.

    Attributes
    ----------
    grid : ObjectGrid
    mu : float
        Mean intensity at every pixel.
    ell : float
        Field correlation length in meters ("speckle size").
    field_cov : ndarray (N, N)
        Gaussian field covariance G, unit diagonal.
    field_factor : ndarray (N, N)
        F with F F^T = G (eigendecomposition, negative eigenvalues clipped).
    intensity_cov : ndarray (N, N)
        mu^2 * G^2 elementwise.
    """

    grid: ObjectGrid
    mu: float
    ell: float
    field_cov: np.ndarray
    field_factor: np.ndarray
    intensity_cov: np.ndarray


@dataclass(frozen=True)
class NoiseModel:
    """I.i.d. zero-mean Gaussian recording noise of a given dimension."""

    sigma: float
    dim: int

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError(f"noise standard deviation must be >= 0, got {self.sigma:g}")
        if self.dim < 1:
            raise ValueError(f"noise dimension must be >= 1, got {self.dim}")

    def covariance(self) -> np.ndarray:
        """Dense sigma^2 * I."""
        return self.sigma**2 * np.eye(self.dim)


def build_speckle_model(grid: ObjectGrid, ell: float, mu: float = 1.0) -> SpeckleModel:
    """Build speckle statistics for a correlation length ell on a grid."""
    if ell <= 0:
        raise ValueError(f"correlation length must be positive, got {ell:g}")
    if mu <= 0:
        raise ValueError(f"mean intensity must be positive, got {mu:g}")
    d2 = squareform(pdist(grid.points, metric="sqeuclidean"))
    g = np.exp(-d2 / (2 * ell**2))
    g = (g + g.T) / 2
    # G is a Gaussian kernel matrix, PSD in exact arithmetic; clip the
    # floating-point negatives before factoring.
    w, q = np.linalg.eigh(g)
    factor = q * np.sqrt(np.maximum(w, 0.0))
    for a in (g, factor):
        a.flags.writeable = False
    gamma_e = mu**2 * g**2
    gamma_e.flags.writeable = False
    return SpeckleModel(
        grid=grid,
        mu=float(mu),
        ell=float(ell),
        field_cov=g,
        field_factor=factor,
        intensity_cov=gamma_e,
    )


def sample_speckle(model: SpeckleModel, rng_seed: int) -> np.ndarray:
    """Draw one speckle intensity pattern; deterministic for a given seed.

    The complex field is F z with z i.i.d. circular standard Gaussian, so
    every pixel has unit mean square and the intensity mean is exactly mu.
    """
    n = model.grid.n_points
    rng = np.random.default_rng(rng_seed)
    z = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2)
    u = model.field_factor @ z
    return model.mu * (u.real**2 + u.imag**2)


def sample_noise(model: NoiseModel, rng_seed: int) -> np.ndarray:
    """Draw one recording-noise vector; deterministic for a given seed."""
    rng = np.random.default_rng(rng_seed)
    return rng.normal(0.0, model.sigma, model.dim)


def calibrate_noise_sigma(clean_recordings, fraction: float = 0.01) -> float:
    """Noise level as a fraction of the largest absolute clean-signal sample."""
    arr = np.asarray(clean_recordings, dtype=float)
    if arr.size == 0:
        raise ValueError("cannot calibrate noise from an empty recording set")
    return fraction * float(np.max(np.abs(arr)))
