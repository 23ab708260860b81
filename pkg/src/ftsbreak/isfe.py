"""Forecast-error based change-point estimation.

One-step forecasts from expanding windows give a series of integrated squared
forecast errors (ISFE); a single break in the drift of that series, fitted by
exhaustive least squares on its first differences, locates the change.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .cusum import ChangePointResult
from .errors import DataError
from .fda import Curve, FunctionalTimeSeries, quadrature_weights
from .fpcr import MIN_FIT_N, fit_fpcr, lee_carter_forecast
from .longrun import KernelSpec

FIRST_WINDOW = 3

Forecaster = Callable[[FunctionalTimeSeries], Curve]


def fpcr_forecaster(kernel: KernelSpec | None = None, alpha: float = 0.05) -> Forecaster:
    """One-step FPCR forecaster; windows too short for the full fit use the
    one-component model."""

    def forecast(window: FunctionalTimeSeries) -> Curve:
        if window.n < MIN_FIT_N:
            return lee_carter_forecast(window, 1)
        return fit_fpcr(window, kernel, alpha).forecast(1)

    return forecast


def lc_forecaster(window: FunctionalTimeSeries) -> Curve:
    return lee_carter_forecast(window, 1)


def get_forecaster(forecaster: Union[str, Forecaster, None]) -> Forecaster:
    if forecaster is None or forecaster == "fpcr":
        return fpcr_forecaster()
    if forecaster == "lc":
        return lc_forecaster
    if callable(forecaster):
        return forecaster
    raise ValueError(f"unknown forecaster {forecaster!r}; expected 'fpcr', 'lc' or a callable")


@dataclass(frozen=True, eq=False)
class IsfeSeries:
    """kappa values for forecast targets 4..n.

    ``targets`` holds the 1-based time index of each forecast target and
    ``labels`` the matching series labels.
    """

    values: np.ndarray
    targets: np.ndarray
    labels: tuple

    def __len__(self) -> int:
        return self.values.size

    @classmethod
    def from_values(cls, values, first_target: int = FIRST_WINDOW + 1) -> "IsfeSeries":
        values = np.asarray(values, dtype=float)
        targets = np.arange(first_target, first_target + values.size)
        return cls(values, targets, tuple(int(t) for t in targets))


@dataclass(frozen=True, eq=False)
class BreakFit:
    """Single break in the mean of the differenced ISFE series.

    ``split`` is the number of differences in the first segment; the break is
    reported at the forecast target of the first difference after the split.
    """

    split: int
    break_index: int
    break_label: object
    drift_before: float
    drift_after: float
    ssr_min: float
    ssr_curve: np.ndarray
    splits: np.ndarray
    total_ss: float


def isfe_series(fts: FunctionalTimeSeries, forecaster: Union[str, Forecaster, None] = None) -> IsfeSeries:
    """kappa_{g+1} = integral of (X_{g+1} - forecast from X_1..X_g)^2, g = 3..n-1."""
    n = fts.n
    if n < FIRST_WINDOW + 2:
        raise DataError(f"ISFE series needs at least {FIRST_WINDOW + 2} curves, got {n}")
    fc = get_forecaster(forecaster)
    w = quadrature_weights(fts.grid)
    kappa = np.empty(n - FIRST_WINDOW)
    for i, g in enumerate(range(FIRST_WINDOW, n)):
        try:
            pred = fc(fts.window(0, g))
        except Exception as exc:
            raise RuntimeError(f"forecaster failed on window 1..{g}: {exc}") from exc
        err = fts.values[g] - pred.values
        kappa[i] = float(w @ (err * err))
    targets = np.arange(FIRST_WINDOW + 1, n + 1)
    labels = tuple(fts.label(t - 1) for t in targets)
    return IsfeSeries(kappa, targets, labels)


def segment_ssr(dk: np.ndarray, min_seg: int = 2) -> tuple[np.ndarray, np.ndarray]:
    """SSR of the two-mean fit for every admissible split of ``dk``.

    Returns (splits, ssr); split s puts ``dk[:s]`` in the first segment.
    """
    m = dk.size
    splits = np.arange(min_seg, m - min_seg + 1)
    c1 = np.concatenate([[0.0], np.cumsum(dk)])
    c2 = np.concatenate([[0.0], np.cumsum(dk * dk)])
    n1 = splits.astype(float)
    n2 = m - n1
    s1, q1 = c1[splits], c2[splits]
    s2, q2 = c1[-1] - s1, c2[-1] - q1
    ssr = (q1 - s1 * s1 / n1) + (q2 - s2 * s2 / n2)
    return splits, np.maximum(ssr, 0.0)


def ssr_breakpoint(series: Union[IsfeSeries, np.ndarray], min_seg: int = 2) -> BreakFit:
    """Exhaustive least-squares fit of one break in the drift of kappa.

    Ties go to the earliest split.
    """
    if not isinstance(series, IsfeSeries):
        series = IsfeSeries.from_values(series)
    if min_seg < 1:
        raise ValueError("min_seg must be at least 1")
    if len(series) < 2 * min_seg + 1:
        raise DataError(f"ISFE series of length {len(series)} is too short for min_seg={min_seg}")
    dk = np.diff(series.values)
    splits, ssr = segment_ssr(dk, min_seg)
    j = int(np.argmin(ssr))
    s = int(splits[j])
    # dk[i] is the change into target series.targets[i + 1]
    pos = s + 1
    total = float(np.sum((dk - dk.mean()) ** 2))
    return BreakFit(
        split=s,
        break_index=int(series.targets[pos]),
        break_label=series.labels[pos],
        drift_before=float(dk[:s].mean()),
        drift_after=float(dk[s:].mean()),
        ssr_min=float(ssr[j]),
        ssr_curve=ssr,
        splits=splits,
        total_ss=total,
    )


def detect_isfe(
    fts: FunctionalTimeSeries,
    forecaster: Union[str, Forecaster, None] = None,
    min_seg: int = 2,
) -> ChangePointResult:
    """Regression-based change-point estimate; defines no p-value."""
    series = isfe_series(fts, forecaster)
    fit = ssr_breakpoint(series, min_seg)
    degenerate = bool(np.ptp(np.diff(series.values)) == 0)
    return ChangePointResult(
        method="isfe",
        statistic=fit.total_ss - fit.ssr_min,
        p_value=None,
        break_index=fit.break_index,
        break_label=fit.break_label,
        trajectory=fit.ssr_curve,
        reject=None,
        degenerate=degenerate,
        details={
            "isfe": series.values,
            "isfe_targets": series.targets,
            "split": fit.split,
            "drift_before": fit.drift_before,
            "drift_after": fit.drift_after,
            "ssr_min": fit.ssr_min,
        },
    )
