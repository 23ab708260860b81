"""Lag autocovariance surfaces and the kernel long-run covariance estimator."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DataError, DegenerateError
from .fda import FunctionalTimeSeries, quadrature_weights

KERNEL_FAMILIES = ("bartlett", "parzen", "flat_top")

# default order, curvature constant lim (1 - W(x)) / |x|^q, and integral of W^2
_KERNEL_CONSTANTS = {
    "bartlett": (1, 1.0, 2.0 / 3.0),
    "parzen": (2, 6.0, 151.0 / 280.0),
    # flat-top has 1 - W(x) = 0 near the origin; a unit constant is used by convention
    "flat_top": (2, 1.0, 4.0 / 3.0),
}

MIN_PLUGIN_N = 10


def kernel_weight(family: str, x) -> np.ndarray:
    """Evaluate the lag window W(x); symmetric, W(0) = 1, zero for |x| >= 1."""
    x = np.abs(np.asarray(x, dtype=float))
    if family == "bartlett":
        w = 1.0 - x
    elif family == "parzen":
        w = np.where(x <= 0.5, 1.0 - 6.0 * x**2 + 6.0 * x**3, 2.0 * (1.0 - x) ** 3)
    elif family == "flat_top":
        w = np.where(x <= 0.5, 1.0, 2.0 * (1.0 - x))
    else:
        raise ValueError(f"unknown kernel family {family!r}; expected one of {KERNEL_FAMILIES}")
    return np.where(x < 1.0, w, 0.0)


@dataclass(frozen=True)
class KernelSpec:
    """Lag window family, its order ``q`` and a bandwidth (``"auto"`` for plug-in)."""

    family: str = "bartlett"
    q: int | None = None
    bandwidth: Union[float, str] = "auto"

    def __post_init__(self):
        if self.family not in KERNEL_FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}; expected one of {KERNEL_FAMILIES}")
        if self.q is None:
            object.__setattr__(self, "q", _KERNEL_CONSTANTS[self.family][0])
        if int(self.q) != self.q or self.q < 1:
            raise ValueError(f"kernel order must be a positive integer, got {self.q!r}")
        if self.bandwidth != "auto":
            if not np.isfinite(self.bandwidth) or float(self.bandwidth) <= 0:
                raise ValueError(f"bandwidth must be positive or 'auto', got {self.bandwidth!r}")

    def weight(self, x) -> np.ndarray:
        return kernel_weight(self.family, x)

    def with_bandwidth(self, h: float) -> "KernelSpec":
        return KernelSpec(self.family, self.q, float(h))


@dataclass(frozen=True, eq=False)
class CovarianceSurface:
    """Discretized kernel C(u_i, u_j) on ``grid``; ``bandwidth`` records the lag window used."""

    grid: np.ndarray
    surface: np.ndarray
    bandwidth: float | None = None

    def __post_init__(self):
        if not np.all(np.isfinite(self.surface)):
            raise DegenerateError("covariance surface has non-finite entries")

    def trace(self) -> float:
        """Integral of C(u, u) over the grid."""
        return float(quadrature_weights(self.grid) @ np.diag(self.surface))

    def hs_norm_sq(self) -> float:
        """Squared Hilbert-Schmidt norm under the product trapezoidal rule."""
        return _hs_norm_sq(self.grid, self.surface)


def _hs_norm_sq(grid: np.ndarray, m: np.ndarray) -> float:
    w = quadrature_weights(grid)
    return float(w @ (m * m) @ w)


def _centered(fts: FunctionalTimeSeries) -> np.ndarray:
    return fts.values - fts.values.mean(axis=0)


def autocovariance_surface(fts: FunctionalTimeSeries, lag: int) -> CovarianceSurface:
    """Empirical lag-``lag`` autocovariance; the divisor is n for every lag.

    Negative lags give the transpose of the matching positive lag.
    """
    n = fts.n
    lag = int(lag)
    if abs(lag) >= n:
        raise DataError(f"|lag| must be below the sample size {n}, got {lag}")
    xc = _centered(fts)
    ell = abs(lag)
    g = xc[: n - ell].T @ xc[ell:] / n
    if lag < 0:
        g = g.T
    return CovarianceSurface(fts.grid, g)


def _lag_weights(n: int, kernel: KernelSpec, h: float, power: int = 0) -> np.ndarray:
    """Weights for lags 0..n-1 (the lag window is symmetric)."""
    lags = np.arange(n)
    w = kernel.weight(lags / h)
    if power:
        w = w * lags.astype(float) ** power
    return w


def _weighted_sum(xc: np.ndarray, lag_w: np.ndarray) -> np.ndarray:
    """``sum_l w(|l|) gamma_l`` for centered rows ``xc``, symmetrized.

    Computed as X_c' (M X_c) / n with M the banded Toeplitz matrix of lag
    weights, applied by shifting rows so M is never formed.
    """
    n = xc.shape[0]
    y = lag_w[0] * xc
    for ell in np.flatnonzero(lag_w[1:]) + 1:
        y[: n - ell] += lag_w[ell] * xc[ell:]
        y[ell:] += lag_w[ell] * xc[: n - ell]
    out = xc.T @ y / n
    return (out + out.T) / 2


def plugin_bandwidth(fts: FunctionalTimeSeries, family: str = "bartlett", q: int | None = None) -> float:
    """Data-driven bandwidth by the pilot-estimate plug-in rule.

    Recipe, with all norms taken under the product trapezoidal rule:

    1. pilot bandwidth ``h0 = n ** (1 / (2q + 1))`` with the same kernel family;
    2. ``C0 = sum_l W(l / h0) gamma_l`` and ``Cq = sum_l |l|^q W(l / h0) gamma_l``;
    3. remove the white-noise floor from the curvature norm: under serial
       independence ``E||gamma_l||^2 ~ (n - l) / n^2 * tr(gamma_0)^2`` for l != 0, so
       ``curv = max(||Cq||^2 - sum_{l != 0} (|l|^q W(l / h0))^2 (n - |l|) / n^2 tr(gamma_0)^2, 0)``;
    4. ``h = (2q k_q^2 curv n / ((||C0||^2 + tr(C0)^2) int W^2)) ** (1 / (2q + 1))``,
       where ``k_q`` is the kernel's curvature constant at the origin.

    The result is clipped to ``[1, n]``: below 1 only lag 0 carries weight for
    every supported family, above n there are no further lags.
    """
    spec = KernelSpec(family, q)
    q = spec.q
    n = fts.n
    if n < MIN_PLUGIN_N:
        raise DataError(f"plug-in bandwidth needs at least {MIN_PLUGIN_N} curves, got {n}")
    xc = _centered(fts)
    if not np.any(xc):
        raise DegenerateError("zero-variance series: plug-in bandwidth undefined")
    h0 = n ** (1.0 / (2 * q + 1))
    c0 = _weighted_sum(xc, _lag_weights(n, spec, h0))
    cq = _weighted_sum(xc, _lag_weights(n, spec, h0, power=q))
    w = quadrature_weights(fts.grid)
    tr = float(w @ np.diag(c0))
    denom = (_hs_norm_sq(fts.grid, c0) + tr * tr) * _KERNEL_CONSTANTS[spec.family][2]
    if denom <= 0:
        raise DegenerateError("pilot long-run covariance vanishes: plug-in bandwidth undefined")
    lag_wq = _lag_weights(n, spec, h0, power=q)[1:]
    tr0 = float(w @ np.sum(xc * xc, axis=0)) / n
    floor = 2 * np.sum(lag_wq**2 * (n - np.arange(1, n))) / n**2 * tr0**2
    curv = max(_hs_norm_sq(fts.grid, cq) - floor, 0.0)
    kq = _KERNEL_CONSTANTS[spec.family][1]
    ratio = 2 * q * kq**2 * curv / denom
    h = (ratio * n) ** (1.0 / (2 * q + 1))
    return float(min(max(h, 1.0), n))


def long_run_covariance(fts: FunctionalTimeSeries, kernel: KernelSpec | None = None) -> CovarianceSurface:
    """Kernel long-run covariance ``sum_l W(l / h) gamma_l``, symmetrized.

    With ``bandwidth="auto"`` the plug-in rule is used; series shorter than
    ``MIN_PLUGIN_N`` fall back to its pilot bandwidth ``n ** (1 / (2q + 1))``.
    """
    kernel = kernel or KernelSpec()
    n = fts.n
    if n < 3:
        raise DataError(f"long-run covariance needs at least 3 curves, got {n}")
    if kernel.bandwidth == "auto" and n < MIN_PLUGIN_N:
        h = n ** (1.0 / (2 * kernel.q + 1))
    elif kernel.bandwidth == "auto":
        h = plugin_bandwidth(fts, kernel.family, kernel.q)
    else:
        h = float(kernel.bandwidth)
    return CovarianceSurface(fts.grid, _weighted_sum(_centered(fts), _lag_weights(n, kernel, h)), bandwidth=h)


def lag0_covariance(fts: FunctionalTimeSeries) -> CovarianceSurface:
    """Symmetrized lag-0 covariance (divisor n)."""
    s = autocovariance_surface(fts, 0).surface
    return CovarianceSurface(fts.grid, (s + s.T) / 2)
