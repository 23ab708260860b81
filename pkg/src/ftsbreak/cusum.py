"""Fully functional CUSUM change-point detection and a functional KPSS check."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import DataError, DegenerateError
from .fda import FunctionalTimeSeries, row_norms_sq
from .longrun import KernelSpec, long_run_covariance
from .spectral import eigendecompose

DEFAULT_REPS = 2000
DEFAULT_BRIDGE_POINTS = 1000
EIGEN_SHARE = 0.9999
EIGEN_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class ChangePointResult:
    """Outcome of a change-point procedure.

    ``break_index`` is 1-based: observations ``1..break_index`` form the
    pre-break regime for the CUSUM detector. ``p_value`` and ``reject`` are
    ``None`` for estimators that define no test.
    """

    method: str
    statistic: float
    p_value: Optional[float]
    break_index: int
    break_label: object
    trajectory: np.ndarray
    reject: Optional[bool]
    level: Optional[float] = None
    degenerate: bool = False
    details: dict = field(default_factory=dict)


class KPSSResult(NamedTuple):
    statistic: float
    p_value: float


def cusum_trajectory(fts: FunctionalTimeSeries) -> np.ndarray:
    """Squared norms ||S_eta||^2, eta = 1..n, of the scaled functional CUSUM
    ``(sum_{t<=eta} X_t - eta/n sum_t X_t) / sqrt(n)``."""
    n = fts.n
    if n < 2:
        raise DataError(f"CUSUM needs at least 2 curves, got {n}")
    # the statistic ignores common shifts; anchoring at the first curve makes
    # constant series give exact zeros
    cs = np.cumsum(fts.values - fts.values[0], axis=0)
    eta = np.arange(1, n + 1)[:, None]
    s = (cs - eta / n * cs[-1]) / np.sqrt(n)
    s[-1] = 0.0
    return row_norms_sq(fts.grid, s)


def locate_break(trajectory: np.ndarray) -> int:
    """1-based index of the first maximum of a CUSUM trajectory."""
    return int(np.argmax(trajectory)) + 1


def _truncate_eigenvalues(eigenvalues) -> np.ndarray:
    lam = np.sort(np.clip(np.asarray(eigenvalues, dtype=float), 0.0, None))[::-1]
    lam = lam[lam > EIGEN_FLOOR]
    if lam.size == 0:
        raise DegenerateError("all eigenvalues are zero: degenerate null distribution")
    share = np.cumsum(lam) / lam.sum()
    keep = int(np.searchsorted(share, EIGEN_SHARE)) + 1
    return lam[:keep]


def null_distribution(
    eigenvalues,
    reps: int = DEFAULT_REPS,
    seed: int = 0,
    points: int = DEFAULT_BRIDGE_POINTS,
    functional: str = "sup",
) -> np.ndarray:
    """Monte-Carlo sample of ``sup_x`` (or the integral over [0, 1]) of
    ``sum_l lambda_l B_l(x)^2`` for independent standard Brownian bridges.

    Bridges live on the grid i/points, i = 1..points; replicate i draws from
    its own generator seeded by ``(seed, i)``.
    """
    if reps < 1:
        raise ValueError("reps must be at least 1")
    if functional not in ("sup", "integral"):
        raise ValueError(f"functional must be 'sup' or 'integral', got {functional!r}")
    lam = _truncate_eigenvalues(eigenvalues)
    x = np.arange(1, points + 1) / points
    out = np.empty(reps)
    for i in range(reps):
        z = np.random.default_rng([seed, i]).standard_normal((lam.size, points))
        w = np.cumsum(z, axis=1) / np.sqrt(points)
        b = w - x * w[:, -1:]
        proc = lam @ (b * b)
        out[i] = proc.max() if functional == "sup" else proc.mean()
    return out


def _p_value(null: np.ndarray, stat: float) -> float:
    return float(np.mean(null >= stat))


def detect_ff(
    fts: FunctionalTimeSeries,
    level: float = 0.05,
    kernel: KernelSpec | None = None,
    reps: int = DEFAULT_REPS,
    seed: int = 0,
    points: int = DEFAULT_BRIDGE_POINTS,
) -> ChangePointResult:
    """Fully functional test for a single change in the mean function.

    The statistic is the maximal squared CUSUM norm; its null law is simulated
    from the eigenvalues of the estimated long-run covariance.
    """
    if fts.n < 4:
        raise DataError(f"detection needs at least 4 curves, got {fts.n}")
    traj = cusum_trajectory(fts)
    stat = float(traj.max())
    idx = locate_break(traj)
    cov = long_run_covariance(fts, kernel or KernelSpec())
    eig = eigendecompose(cov)
    null = null_distribution(eig.eigenvalues, reps=reps, seed=seed, points=points, functional="sup")
    p = _p_value(null, stat)
    return ChangePointResult(
        method="ff",
        statistic=stat,
        p_value=p,
        break_index=idx,
        break_label=fts.label(idx - 1),
        trajectory=traj,
        reject=bool(p < level),
        level=level,
        details={
            "bandwidth": cov.bandwidth,
            "eigenvalues": _truncate_eigenvalues(eig.eigenvalues),
            "reps": reps,
            "seed": seed,
        },
    )


def kpss_test(
    fts: FunctionalTimeSeries,
    kernel: KernelSpec | None = None,
    reps: int = DEFAULT_REPS,
    seed: int = 0,
    points: int = DEFAULT_BRIDGE_POINTS,
) -> KPSSResult:
    """Stationarity check based on the integrated squared CUSUM norm.

    Large values of ``(1/n) sum_eta ||S_eta||^2`` indicate a non-stationary mean.
    """
    if fts.n < 4:
        raise DataError(f"KPSS test needs at least 4 curves, got {fts.n}")
    stat = float(cusum_trajectory(fts).mean())
    if stat == 0.0:
        return KPSSResult(0.0, 1.0)
    eig = eigendecompose(long_run_covariance(fts, kernel or KernelSpec()))
    null = null_distribution(eig.eigenvalues, reps=reps, seed=seed, points=points, functional="integral")
    return KPSSResult(stat, _p_value(null, stat))
