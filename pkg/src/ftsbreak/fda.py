"""Discretized functional data.

Curves are represented by their values on a common, strictly increasing grid.
All integrals use the trapezoidal rule on that (possibly non-uniform) grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DataError


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


def _check_grid(grid: np.ndarray) -> None:
    if grid.ndim != 1:
        raise DataError("grid must be one-dimensional")
    if grid.size < 2:
        raise DataError(f"grid needs at least 2 points, got {grid.size}")
    bad = np.flatnonzero(~np.isfinite(grid))
    if bad.size:
        raise DataError(f"non-finite grid value at position {bad[0]}")
    steps = np.diff(grid)
    if np.any(steps <= 0):
        i = int(np.flatnonzero(steps <= 0)[0])
        raise DataError(f"unsorted grid: grid[{i + 1}]={grid[i + 1]!r} <= grid[{i}]={grid[i]!r}")


def quadrature_weights(grid: np.ndarray) -> np.ndarray:
    """Trapezoidal weights ``w`` such that ``sum(w * f)`` approximates the integral of f."""
    grid = np.asarray(grid, dtype=float)
    h = np.diff(grid)
    w = np.zeros_like(grid)
    w[:-1] += h / 2
    w[1:] += h / 2
    return w


@dataclass(frozen=True, eq=False)
class Curve:
    """A single function sampled on ``grid``."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        grid = _frozen(self.grid)
        values = _frozen(self.values)
        _check_grid(grid)
        if values.shape != grid.shape:
            raise DataError(f"curve has {values.size} values for a grid of {grid.size} points")
        bad = np.flatnonzero(~np.isfinite(values))
        if bad.size:
            raise DataError(f"non-finite curve value at column {bad[0]}")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True, eq=False)
class FunctionalTimeSeries:
    """n curves on a shared grid of J points; row t of ``values`` is curve t.

    ``labels`` are optional time stamps (e.g. calendar years), one per row.
    """

    grid: np.ndarray
    values: np.ndarray
    labels: Optional[np.ndarray] = None

    def __post_init__(self):
        grid = _frozen(self.grid)
        _check_grid(grid)
        values = np.array(self.values, dtype=float, copy=True)
        if values.ndim != 2:
            raise DataError(f"values must be an n x J matrix, got {values.ndim} dimension(s)")
        if values.shape[1] != grid.size:
            raise DataError(
                f"dimension mismatch: values have {values.shape[1]} columns, grid has {grid.size} points"
            )
        bad = np.argwhere(~np.isfinite(values))
        if bad.size:
            i, j = bad[0]
            raise DataError(f"non-finite value at row {i}, column {j}")
        values.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        if self.labels is not None:
            labels = np.array(self.labels, copy=True)
            if labels.shape != (values.shape[0],):
                raise DataError(f"expected {values.shape[0]} labels, got {labels.size}")
            if labels.size > 1 and np.any(np.diff(labels) <= 0):
                i = int(np.flatnonzero(np.diff(labels) <= 0)[0])
                raise DataError(f"labels must be strictly increasing (position {i + 1})")
            labels.setflags(write=False)
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def J(self) -> int:
        return self.grid.size

    def __len__(self) -> int:
        return self.n

    def curve(self, t: int) -> Curve:
        return Curve(self.grid, self.values[t])

    def label(self, t: int):
        """Label of 0-based row ``t``; the 1-based time index when unlabelled."""
        if self.labels is None:
            return t + 1
        lab = self.labels[t]
        return lab.item() if hasattr(lab, "item") else lab

    def window(self, start: int, stop: int) -> "FunctionalTimeSeries":
        """Rows ``start:stop`` (0-based, half open) with their labels."""
        labels = None if self.labels is None else self.labels[start:stop]
        return FunctionalTimeSeries(self.grid, self.values[start:stop], labels)

    def with_values(self, values: np.ndarray) -> "FunctionalTimeSeries":
        return FunctionalTimeSeries(self.grid, values, self.labels)


def make_fts(grid: Sequence[float], values, labels=None) -> FunctionalTimeSeries:
    """Validate and copy ``values`` (n x J) sampled on ``grid`` into a series."""
    return FunctionalTimeSeries(np.asarray(grid, dtype=float), np.asarray(values, dtype=float), labels)


def _same_grid(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape or not np.array_equal(a, b):
        raise DataError("grid mismatch")


def inner_product(f: Curve, g: Curve) -> float:
    """Trapezoidal approximation of the L2 inner product of two curves."""
    _same_grid(f.grid, g.grid)
    return float(np.sum(quadrature_weights(f.grid) * f.values * g.values))


def l2_norm_sq(f: Curve) -> float:
    return inner_product(f, f)


def row_norms_sq(grid: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Squared L2 norm of every row of ``values`` (vectorized ``l2_norm_sq``)."""
    w = quadrature_weights(grid)
    return (values * values) @ w


def mean_function(fts: FunctionalTimeSeries) -> Curve:
    if fts.n < 1:
        raise DataError("empty series has no mean function")
    return Curve(fts.grid, fts.values.mean(axis=0))


def center(fts: FunctionalTimeSeries) -> FunctionalTimeSeries:
    return fts.with_values(fts.values - mean_function(fts).values)


def difference(fts: FunctionalTimeSeries) -> FunctionalTimeSeries:
    """First differences X_{t+1} - X_t; labels follow the later period."""
    if fts.n < 2:
        raise DataError(f"differencing needs at least 2 curves, got {fts.n}")
    labels = None if fts.labels is None else fts.labels[1:]
    return FunctionalTimeSeries(fts.grid, np.diff(fts.values, axis=0), labels)


def log_transform(
    fts: FunctionalTimeSeries,
    base: float = 10.0,
    zero_policy: str = "half_min",
    offset: float = 1e-8,
) -> FunctionalTimeSeries:
    """Entry-wise logarithm.

    zero_policy
        ``"half_min"`` replaces zeros by half the smallest positive entry of the
        series; ``"offset"`` adds ``offset`` to every entry; ``"error"`` refuses zeros.
    """
    v = fts.values
    neg = np.argwhere(v < 0)
    if neg.size:
        i, j = neg[0]
        raise DataError(f"negative value at row {i}, column {j}; cannot take logarithms")
    if zero_policy == "half_min":
        if np.any(v == 0):
            pos = v[v > 0]
            if pos.size == 0:
                raise DataError("series has no positive entries")
            v = np.where(v == 0, pos.min() / 2, v)
    elif zero_policy == "offset":
        if offset <= 0:
            raise DataError("offset must be positive")
        v = v + offset
    elif zero_policy == "error":
        if np.any(v == 0):
            i, j = np.argwhere(v == 0)[0]
            raise DataError(f"zero value at row {i}, column {j}")
    else:
        raise ValueError(f"unknown zero_policy {zero_policy!r}")
    if base == 10:
        out = np.log10(v)
    elif base == np.e:
        out = np.log(v)
    else:
        out = np.log(v) / np.log(base)
    return fts.with_values(out)
