"""Functional principal component regression for non-stationary curve series.

Leading components whose scores behave like I(1) processes are forecast by a
random walk with drift, the remaining retained components by an AR(1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import DataError, DegenerateError
from .fda import Curve, FunctionalTimeSeries, difference, mean_function
from .longrun import KernelSpec, lag0_covariance, long_run_covariance
from .spectral import eigendecompose, eigenvalue_ratio_r, fpc_scores

I1_DRIFT = "I1-drift"
STATIONARY_AR = "stationary-AR"

MIN_FIT_N = 8


@dataclass(frozen=True, eq=False)
class FPCRModel:
    """A fitted functional principal component regression.

    ``residuals`` are X_t - mean - (first r components), taken before any
    augmentation with stationary components.
    """

    mean: Curve
    r: int
    K: int
    eigenfunctions: np.ndarray
    scores: np.ndarray
    residuals: FunctionalTimeSeries
    independence_p: float
    eigenvalues: np.ndarray

    @property
    def grid(self) -> np.ndarray:
        return self.mean.grid

    def score_kinds(self) -> list[str]:
        return [I1_DRIFT] * self.r + [STATIONARY_AR] * (self.K - self.r)

    def forecast(self, h: int = 1) -> Curve:
        return forecast_curve(self, h)


@dataclass(frozen=True)
class ScoreForecast:
    horizon: int
    values: np.ndarray
    kinds: tuple


def independence_test(residuals: FunctionalTimeSeries, H: int = 10, d: int | None = None, share: float = 0.9) -> float:
    """Portmanteau test of serial independence for a curve series; returns the p-value.

    Curves are reduced to their first ``d`` principal component scores (by
    default the fewest components explaining ``share`` of the variance) and
    ``Q = n sum_{h<=H} tr(C_h' C_0^-1 C_h C_0^-1)`` is referred to a
    chi-square law with ``d^2 H`` degrees of freedom.
    """
    n = residuals.n
    eig = eigendecompose(lag0_covariance(residuals))
    lam = eig.eigenvalues
    if lam.sum() <= 0:
        raise DegenerateError("residuals have zero variance")
    if d is None:
        d = int(np.searchsorted(np.cumsum(lam) / lam.sum(), share)) + 1
    if n <= H + d:
        raise DataError(f"independence test needs n > H + d = {H + d}, got n={n}")
    s = fpc_scores(residuals, eig.eigenfunctions[:d], mean_function(residuals))
    s = s - s.mean(axis=0)
    c0 = s.T @ s / n
    try:
        c0_inv = np.linalg.inv(c0)
    except np.linalg.LinAlgError as exc:
        raise DegenerateError("singular lag-0 score covariance") from exc
    if not np.all(np.isfinite(c0_inv)) or np.linalg.cond(c0) > 1e12:
        raise DegenerateError("singular lag-0 score covariance")
    q = 0.0
    for h in range(1, H + 1):
        ch = s[: n - h].T @ s[h:] / n
        q += np.trace(ch.T @ c0_inv @ ch @ c0_inv)
    return float(stats.chi2.sf(n * q, d * d * H))


def forecast_scores(column, kind: str, h: int = 1) -> float:
    """h-step forecast of one score series.

    ``I1-drift``: last value plus h times the mean first difference.
    ``stationary-AR``: AR(1) fitted by least squares about the sample mean.
    """
    y = np.asarray(column, dtype=float)
    if h < 1:
        raise ValueError(f"forecast horizon must be at least 1, got {h}")
    if y.size < 3:
        raise DataError(f"score forecasting needs at least 3 values, got {y.size}")
    if kind == I1_DRIFT:
        return float(y[-1] + h * np.mean(np.diff(y)))
    if kind == STATIONARY_AR:
        m = y.mean()
        yc = y - m
        den = yc[:-1] @ yc[:-1]
        phi = (yc[1:] @ yc[:-1]) / den if den > 0 else 0.0
        return float(m + phi**h * yc[-1])
    raise ValueError(f"unknown score model {kind!r}")


def forecast_score_vector(model: FPCRModel, h: int = 1) -> ScoreForecast:
    kinds = tuple(model.score_kinds())
    vals = np.array([forecast_scores(model.scores[:, k], kinds[k], h) for k in range(model.K)])
    return ScoreForecast(h, vals, kinds)


def forecast_curve(model: FPCRModel, h: int = 1) -> Curve:
    """Mean plus forecast scores times the retained eigenfunctions."""
    if h < 1:
        raise ValueError(f"forecast horizon must be at least 1, got {h}")
    fc = forecast_score_vector(model, h)
    return Curve(model.grid, model.mean.values + fc.values @ model.eigenfunctions[: model.K])


def _ratio_count(fts: FunctionalTimeSeries, kernel: KernelSpec) -> int:
    eig = eigendecompose(long_run_covariance(fts, kernel))
    if not np.any(eig.eigenvalues > 0):
        return 0
    return eigenvalue_ratio_r(eig.eigenvalues, fts.n)


def fit_fpcr(
    fts: FunctionalTimeSeries,
    kernel: KernelSpec | None = None,
    alpha: float = 0.05,
    H: int = 10,
) -> FPCRModel:
    """Fit the non-stationary FPCR model.

    r comes from the eigenvalue-ratio criterion on the long-run covariance of
    the differenced series; if the residuals after r components fail the
    independence test at ``alpha``, further components are added as chosen by
    the same criterion on the residuals' long-run covariance. Eigenfunctions
    and scores come from the lag-0 covariance of the series itself.
    """
    kernel = kernel or KernelSpec()
    n = fts.n
    if n < MIN_FIT_N:
        raise DataError(f"FPCR fit needs at least {MIN_FIT_N} curves, got {n}")
    mean = mean_function(fts)
    eig0 = eigendecompose(lag0_covariance(fts))
    rank = int(min(np.sum(eig0.eigenvalues > 1e-12 * max(eig0.eigenvalues[0], 1e-300)), n - 1))
    if eig0.eigenvalues[0] <= 0:
        rank = 0
    r = max(_ratio_count(difference(fts), kernel), 1)
    r = min(r, max(rank, 1))
    phi = eig0.eigenfunctions
    scores = fpc_scores(fts, phi[:r], mean)
    resid_values = fts.values - mean.values - scores @ phi[:r]
    residuals = fts.with_values(resid_values)

    p = _independence_p(residuals, H, float(eig0.eigenvalues.sum()))
    K = r
    if p <= alpha and rank > r:
        k_z = _ratio_count(residuals, kernel)
        K = min(r + k_z, rank)
    scores = fpc_scores(fts, phi[:K], mean)
    return FPCRModel(mean, r, K, phi[:K].copy(), scores, residuals, p, eig0.eigenvalues)


def _independence_p(residuals: FunctionalTimeSeries, H: int, total_variance: float) -> float:
    """Independence p-value with the lag count shortened for short windows.

    Residuals that cannot be tested count as independent: too few curves, or
    a variance that is rounding error relative to ``total_variance`` of the series.
    """
    try:
        eig = eigendecompose(lag0_covariance(residuals))
        lam = eig.eigenvalues
        if lam.sum() <= 1e-20 * total_variance or lam[0] == 0:
            return 1.0
        d = int(np.searchsorted(np.cumsum(lam) / lam.sum(), 0.9)) + 1
        h_eff = min(H, residuals.n - d - 1)
        if h_eff < 1:
            return 1.0
        return independence_test(residuals, H=h_eff, d=d)
    except DegenerateError:
        return 1.0


def fit_lee_carter(fts: FunctionalTimeSeries) -> FPCRModel:
    """One-component model: mean, leading lag-0 eigenfunction, drifting score."""
    if fts.n < 3:
        raise DataError(f"Lee-Carter fit needs at least 3 curves, got {fts.n}")
    mean = mean_function(fts)
    eig0 = eigendecompose(lag0_covariance(fts))
    phi = eig0.eigenfunctions[:1].copy()
    scores = fpc_scores(fts, phi, mean)
    residuals = fts.with_values(fts.values - mean.values - scores @ phi)
    return FPCRModel(mean, 1, 1, phi, scores, residuals, float("nan"), eig0.eigenvalues)


def lee_carter_forecast(log_rates: FunctionalTimeSeries, h: int = 1) -> Curve:
    """h-step forecast from the one-component (Lee-Carter) functional model."""
    return forecast_curve(fit_lee_carter(log_rates), h)
