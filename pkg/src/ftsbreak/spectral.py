"""Eigendecomposition of covariance surfaces, FPC scores and component selection."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError, DegenerateError
from .fda import Curve, FunctionalTimeSeries, quadrature_weights
from .longrun import CovarianceSurface


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """Descending, non-negative eigenvalues and L2-orthonormal eigenfunctions.

    ``eigenfunctions`` is a (K, J) array; row k samples the k-th eigenfunction.
    """

    grid: np.ndarray
    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray

    def __len__(self) -> int:
        return self.eigenvalues.size

    def eigenfunction(self, k: int) -> Curve:
        return Curve(self.grid, self.eigenfunctions[k])

    def head(self, k: int) -> "EigenDecomposition":
        return EigenDecomposition(self.grid, self.eigenvalues[:k], self.eigenfunctions[:k])


def eigendecompose(cov: CovarianceSurface) -> EigenDecomposition:
    """Solve the quadrature-weighted eigenproblem of a covariance surface.

    With trapezoid weights w the integral operator is discretized as
    ``C diag(w)``; we decompose the symmetric ``W^1/2 C W^1/2`` and map the
    eigenvectors back through ``W^-1/2`` so the eigenfunctions are orthonormal
    under the trapezoidal inner product. Negative eigenvalues are clipped to 0,
    and each eigenfunction is signed so its largest-magnitude entry is positive.
    """
    c = np.asarray(cov.surface, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] != np.size(cov.grid):
        raise DataError(f"covariance surface must be J x J on the grid, got shape {c.shape}")
    if not np.all(np.isfinite(c)):
        raise DegenerateError("covariance surface has non-finite entries")
    c = (c + c.T) / 2
    sw = np.sqrt(quadrature_weights(cov.grid))
    vals, vecs = np.linalg.eigh(sw[:, None] * c * sw[None, :])
    order = np.argsort(vals, kind="stable")[::-1]
    vals = np.clip(vals[order], 0.0, None)
    fns = (vecs[:, order] / sw[:, None]).T
    idx = np.argmax(np.abs(fns), axis=1)
    signs = np.sign(fns[np.arange(fns.shape[0]), idx])
    signs[signs == 0] = 1.0
    fns = fns * signs[:, None]
    return EigenDecomposition(np.asarray(cov.grid, dtype=float), vals, fns)


def fpc_scores(fts: FunctionalTimeSeries, eigenfunctions, mean: Curve) -> np.ndarray:
    """Scores <X_t - mean, zeta_k> as an (n, K) matrix."""
    if isinstance(eigenfunctions, EigenDecomposition):
        eigenfunctions = eigenfunctions.eigenfunctions
    phi = np.atleast_2d(np.asarray(eigenfunctions, dtype=float))
    if phi.shape[1] != fts.J or not np.array_equal(mean.grid, fts.grid):
        raise DataError("grid mismatch between series, mean and eigenfunctions")
    w = quadrature_weights(fts.grid)
    return (fts.values - mean.values) @ (w[:, None] * phi.T)


def reconstruct(mean: Curve, eigenfunctions, scores: np.ndarray, K: int) -> FunctionalTimeSeries:
    """Rows ``mean + sum_{k < K} scores[t, k] * zeta_k``."""
    if isinstance(eigenfunctions, EigenDecomposition):
        eigenfunctions = eigenfunctions.eigenfunctions
    phi = np.atleast_2d(np.asarray(eigenfunctions, dtype=float))
    scores = np.atleast_2d(np.asarray(scores, dtype=float))
    if not 0 <= K <= min(phi.shape[0], scores.shape[1]):
        raise DataError(f"K={K} out of range for {phi.shape[0]} eigenfunctions")
    values = mean.values + scores[:, :K] @ phi[:K]
    return FunctionalTimeSeries(mean.grid, values)


def eigenvalue_ratio_r(eigenvalues, n: int) -> int:
    """Number of components chosen by the penalized eigenvalue-ratio criterion.

    ``k_max`` counts eigenvalues at least as large as their sum divided by n;
    ratios beyond the threshold ``1 / ln(max(lambda_1, n))`` (relative to
    lambda_1) score 1. The first minimizer wins ties.
    """
    lam = np.asarray(eigenvalues, dtype=float)
    if lam.size == 0 or not np.any(lam > 0):
        raise DegenerateError("all eigenvalues are zero")
    if lam[0] <= 0 or np.any(np.diff(lam) > 0):
        raise DataError("eigenvalues must be sorted in descending order with lambda_1 > 0")
    k_max = int(np.sum(lam >= lam.sum() / n))
    k_max = max(k_max, 1)
    theta = 1.0 / math.log(max(lam[0], n))
    padded = np.append(lam, 0.0)
    best_k, best = 1, math.inf
    for k in range(1, k_max + 1):
        rel = padded[k - 1] / lam[0]
        obj = padded[k] / padded[k - 1] if rel >= theta else 1.0
        if obj < best:
            best_k, best = k, obj
    return best_k
