"""Out-of-sample comparison of training periods chosen by change-point detectors.

The series is split at ``split_year``. Each detector is run on the initial
training sample, each detected break gives a candidate start year, and for
every candidate an expanding window of one-step forecasts is scored against
the holdout years by MAPE.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cusum import detect_ff
from .errors import DataError
from .fda import FunctionalTimeSeries
from .isfe import detect_isfe, get_forecaster
from .longrun import KernelSpec
from .rates import RateTable, to_fts
from .report import Report

MIN_HOLDOUT = 10
NO_BREAK_TOL = 1e-6
FULL_SAMPLE = "full sample"


def evaluate_mape(actual: FunctionalTimeSeries, forecasts: FunctionalTimeSeries) -> float:
    """Mean of ``|actual - forecast| / |actual|`` over all ages and years.

    Returned as a fraction (0.1 means 10%). The absolute value in the
    denominator lets log-scale series with negative values be compared.
    """
    a = np.asarray(getattr(actual, "values", actual), dtype=float)
    f = np.asarray(getattr(forecasts, "values", forecasts), dtype=float)
    if a.shape != f.shape:
        raise DataError(f"actual {a.shape} and forecasts {f.shape} differ in shape")
    if hasattr(actual, "grid") and hasattr(forecasts, "grid") and not np.array_equal(actual.grid, forecasts.grid):
        raise DataError("actual and forecasts are on different grids")
    zero = np.argwhere(a == 0)
    if zero.size:
        t, j = zero[0]
        raise DataError(f"zero actual value at row {t}, column {j}")
    return float(np.mean(np.abs(a - f) / np.abs(a)))


@dataclass(frozen=True)
class EvaluationConfig:
    detectors: tuple = ("ff", "isfe")
    forecaster: str = "lc"
    detect_forecaster: str = "fpcr"
    transform: str = "log10"
    compare: str = "transformed"
    user_start: int | None = None
    level: float = 0.05
    reps: int = 1000
    seed: int = 0
    zero_policy: str = "half_min"


def _years_of(fts: FunctionalTimeSeries) -> np.ndarray:
    return np.array([fts.label(t) for t in range(fts.n)])


def _detect(train: FunctionalTimeSeries, method: str, cfg: EvaluationConfig) -> dict:
    years = _years_of(train)
    if method == "ff":
        res = detect_ff(train, level=cfg.level, kernel=KernelSpec(), reps=cfg.reps, seed=cfg.seed)
        # observations 1..break_index are the old regime
        start = int(years[min(res.break_index, train.n - 1)])
    elif method == "isfe":
        res = detect_isfe(train, cfg.detect_forecaster)
        start = int(res.break_label)
    else:
        raise ValueError(f"unknown detector {method!r}")
    return {
        "break_year": int(res.break_label),
        "start_year": start,
        "statistic": res.statistic,
        "p_value": res.p_value,
        "reject": res.reject,
        "trajectory": res.trajectory,
    }


def expanding_forecasts(fts: FunctionalTimeSeries, start_year: int, targets, forecaster) -> np.ndarray:
    """One-step forecasts of each target year from all curves in [start_year, target)."""
    fc = get_forecaster(forecaster)
    years = _years_of(fts)
    out = np.empty((len(targets), fts.J))
    for i, y in enumerate(targets):
        lo = int(np.searchsorted(years, start_year))
        hi = int(np.searchsorted(years, y))
        if hi - lo < 3:
            raise DataError(f"training window {start_year}..{y - 1} has fewer than 3 years")
        out[i] = fc(fts.window(lo, hi)).values
    return out


def _scale(values: np.ndarray, transform: str, compare: str) -> np.ndarray:
    if compare == "transformed" or transform == "none":
        return values
    if compare == "raw":
        return 10.0**values
    raise ValueError(f"compare must be 'transformed' or 'raw', got {compare!r}")


def run_evaluation(table: RateTable, split_year: int, config: EvaluationConfig | None = None) -> Report:
    """Detect on the training sample, then compare holdout MAPE by training start."""
    cfg = config or EvaluationConfig()
    fts = to_fts(table, cfg.transform, cfg.zero_policy)
    years = _years_of(fts)
    n_train = int(np.sum(years <= split_year))
    holdout = years[n_train:]
    if holdout.size < MIN_HOLDOUT:
        raise DataError(f"need at least {MIN_HOLDOUT} years after {split_year}, got {holdout.size}")
    train = fts.window(0, n_train)

    detections, failures = {}, {}
    starts = {FULL_SAMPLE: int(years[0])}
    for method in cfg.detectors:
        try:
            detections[method] = _detect(train, method, cfg)
            starts[method] = detections[method]["start_year"]
        except Exception as exc:
            failures[f"detect:{method}"] = f"{type(exc).__name__}: {exc}"
    if cfg.user_start is not None:
        starts["user"] = int(cfg.user_start)

    actual = _scale(fts.values[n_train:], cfg.transform, cfg.compare)
    mape, forecasts = {}, {}
    for name, start in starts.items():
        try:
            pred = expanding_forecasts(fts, start, holdout, cfg.forecaster)
            forecasts[name] = _scale(pred, cfg.transform, cfg.compare)
            mape[name] = evaluate_mape(actual, forecasts[name])
        except Exception as exc:
            failures[f"forecast:{name}"] = f"{type(exc).__name__}: {exc}"

    flags = []
    if len(mape) > 1 and np.ptp(list(mape.values())) < NO_BREAK_TOL:
        flags.append("no material break")
    table_rows = [
        {"training": name, "start_year": starts[name], "mape_percent": 100.0 * mape[name]}
        for name in starts
        if name in mape
    ]
    payload = {
        "split_year": int(split_year),
        "holdout_years": holdout,
        "ages": fts.grid,
        "detections": detections,
        "comparison": table_rows,
        "mape": mape,
        "actual": actual,
        "forecasts": forecasts,
        "failures": failures,
        "flags": flags,
    }
    params = {
        "detectors": list(cfg.detectors),
        "forecaster": cfg.forecaster,
        "detect_forecaster": cfg.detect_forecaster,
        "transform": cfg.transform,
        "compare": cfg.compare,
        "user_start": cfg.user_start,
        "kernel": "bartlett",
        "bandwidth": "auto",
        "level": cfg.level,
        "reps": cfg.reps,
    }
    return Report("evaluate", params, payload, seed=cfg.seed, input_fingerprint=table.fingerprint)
