"""Data-generating processes with a planted change and the Monte-Carlo runner."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .cusum import cusum_trajectory, locate_break
from .errors import DataError
from .fda import FunctionalTimeSeries
from .isfe import detect_isfe
from .longrun import KernelSpec, long_run_covariance

DGP_KINDS = ("far1", "abrupt", "gradual")


@dataclass(frozen=True)
class DgpConfig:
    """Settings for one simulation design.

    far1 uses ``omega``, ``rho`` and ``c``; abrupt/gradual use ``a_kind``,
    ``snr``, ``direction``, ``n_basis``, ``noise_sd`` and (gradual only) ``alpha``.
    ``trace`` selects how the error long-run covariance enters the SNR:
    ``"matrix"`` sums its diagonal over the grid points, ``"quadrature"``
    integrates it. ``far1_offset`` places the 0.1 of the FAR(1) ratio
    denominator ``"inside"`` the absolute value, ``|X_{t-1} + 0.1|``, or
    ``"outside"`` it, ``|X_{t-1}| + 0.1``.
    """

    kind: str = "abrupt"
    n: int = 100
    grid_size: int = 101
    omega: float = 0.1
    rho: float = 0.2
    c: float = 0.7
    a_kind: str = "band"
    snr: float = 0.5
    direction: int = 1
    alpha: float = 0.5
    n_basis: int = 21
    noise_sd: float = 0.1
    trace: str = "matrix"
    c_override: float | None = None
    far1_offset: str = "inside"

    def __post_init__(self):
        if self.kind not in DGP_KINDS:
            raise ValueError(f"unknown DGP {self.kind!r}; expected one of {DGP_KINDS}")
        if self.n < 8:
            raise ValueError(f"n must be at least 8, got {self.n}")
        if self.grid_size < 2:
            raise ValueError("grid_size must be at least 2")
        if self.trace not in ("matrix", "quadrature"):
            raise ValueError(f"trace must be 'matrix' or 'quadrature', got {self.trace!r}")
        if self.far1_offset not in ("inside", "outside"):
            raise ValueError(f"far1_offset must be 'inside' or 'outside', got {self.far1_offset!r}")
        if self.kind == "far1":
            if not (abs(self.rho) < 1 and abs(self.rho + self.c) < 1):
                raise ValueError(f"FAR(1) needs |rho| < 1 and |rho + c| < 1, got rho={self.rho}, c={self.c}")
        else:
            if self.a_kind not in ("band", "diag"):
                raise ValueError(f"a_kind must be 'band' or 'diag', got {self.a_kind!r}")
            if self.snr < 0:
                raise ValueError("SNR must be non-negative")
            if not 1 <= self.direction <= self.n_basis:
                raise ValueError(f"break direction must lie in 1..{self.n_basis}")
            if self.kind == "gradual" and not 0 < self.alpha <= 0.5:
                raise ValueError(f"alpha must lie in (0, 1/2], got {self.alpha}")

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.grid_size)


def brownian_motion(grid, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Standard Brownian motion on ``grid`` (values shaped (J,) or (size, J))."""
    grid = np.asarray(grid, dtype=float)
    if grid[0] < 0:
        raise DataError("Brownian motion grid must start at or after 0")
    steps = np.diff(np.concatenate([[0.0], grid]))
    shape = (grid.size,) if size is None else (size, grid.size)
    return np.cumsum(rng.standard_normal(shape) * np.sqrt(steps), axis=-1)


def dgp_far1(config: DgpConfig, rng: np.random.Generator) -> tuple[FunctionalTimeSeries, int]:
    """Pointwise FAR(1) whose coefficient jumps from rho to rho + c after tau = ceil(n/2).

    The observed series is ``Y_t = |X_{t-1} - X_t| / |X_{t-1} + 0.1|`` for
    t = 2..n, labelled by t.
    """
    n, u = config.n, config.grid
    tau = math.ceil(n / 2)
    b = brownian_motion(u, rng, size=n)
    x = np.empty((n, u.size))
    x[0] = 10.0 * u * (1.0 - u) + config.omega * b[0]
    for t in range(2, n + 1):
        coef = config.rho if t <= tau else config.rho + config.c
        x[t - 1] = coef * x[t - 2] + config.omega * b[t - 1]
    if config.far1_offset == "inside":
        den = np.abs(x[:-1] + 0.1)
    else:
        den = np.abs(x[:-1]) + 0.1
    y = np.abs(x[:-1] - x[1:]) / den
    return FunctionalTimeSeries(u, y, np.arange(2, n + 1)), tau


def fourier_basis(grid, K: int = 21) -> np.ndarray:
    """{1, sqrt(2) sin(2 pi j u), sqrt(2) cos(2 pi j u)}, j = 1.., as a (K, J) array."""
    u = np.asarray(grid, dtype=float)
    out = [np.ones_like(u)]
    j = 1
    while len(out) < K:
        out.append(math.sqrt(2) * np.sin(2 * math.pi * j * u))
        if len(out) < K:
            out.append(math.sqrt(2) * np.cos(2 * math.pi * j * u))
        j += 1
    return np.array(out[:K])


def var1_matrix(K: int, a_kind: str, rng: np.random.Generator) -> np.ndarray:
    if a_kind == "diag":
        return np.diag(rng.uniform(-0.5, 0.5, size=K))
    if a_kind == "band":
        i, j = np.indices((K, K))
        return np.where(np.abs(i - j) <= 3, rng.uniform(-0.3, 0.3, size=(K, K)), 0.0)
    raise ValueError(f"a_kind must be 'band' or 'diag', got {a_kind!r}")


def var1_scores(
    n: int,
    K: int,
    a_kind: str,
    rng: np.random.Generator,
    A: np.ndarray | None = None,
    rho: float = 0.5,
) -> np.ndarray:
    """VAR(1) score vectors beta_t = A beta_{t-1} + psi_t as an (n, K) matrix.

    ``diag``: psi has correlation rho^|i-j|; ``band``: psi is standard normal.
    A fresh coefficient matrix is drawn unless ``A`` is given.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if A is None:
        A = var1_matrix(K, a_kind, rng)
    if a_kind == "diag":
        idx = np.arange(K)
        chol = np.linalg.cholesky(rho ** np.abs(np.subtract.outer(idx, idx)))
        psi = rng.standard_normal((n, K)) @ chol.T
    else:
        psi = rng.standard_normal((n, K))
    beta = np.empty((n, K))
    beta[0] = psi[0]
    for t in range(1, n):
        beta[t] = A @ beta[t - 1] + psi[t]
    return beta


def snr_to_c(snr: float, p: float, trace: float) -> float:
    """Break magnitude c with SNR = c p (1 - p) / trace."""
    if not 0 < p < 1:
        raise ValueError(f"break fraction p must lie in (0, 1), got {p}")
    if trace <= 0:
        raise ValueError(f"trace must be positive, got {trace}")
    return snr * trace / (p * (1 - p))


def break_function(k: int, basis: np.ndarray, c: float) -> np.ndarray:
    """sqrt(c / k) times the sum of the first k basis functions."""
    basis = np.atleast_2d(basis)
    if not 1 <= k <= basis.shape[0]:
        raise ValueError(f"break direction k must lie in 1..{basis.shape[0]}, got {k}")
    if c < 0:
        raise ValueError("c must be non-negative")
    return basis[:k].sum(axis=0) / math.sqrt(k) * math.sqrt(c)


def draw_break_time(n: int, rng: np.random.Generator) -> int:
    tau = math.floor(rng.uniform(0.25 * n, 0.75 * n) + 0.5)
    return int(min(max(tau, 2), n - 2))


def _error_process(config: DgpConfig, rng: np.random.Generator) -> np.ndarray:
    u = config.grid
    basis = fourier_basis(u, config.n_basis)
    picks = rng.integers(0, config.n_basis, size=config.n_basis)
    beta = var1_scores(config.n, config.n_basis, config.a_kind, rng)
    noise = config.noise_sd * rng.standard_normal((config.n, u.size))
    return beta @ basis[picks] + noise


def _planted_break(config: DgpConfig, rng: np.random.Generator, gradual: bool):
    n, u = config.n, config.grid
    tau = draw_break_time(n, rng)
    eps = _error_process(config, rng)
    if config.c_override is not None:
        c = float(config.c_override)
    else:
        cov = long_run_covariance(FunctionalTimeSeries(u, eps), KernelSpec())
        trace = float(np.trace(cov.surface)) if config.trace == "matrix" else cov.trace()
        c = snr_to_c(config.snr, tau / n, trace)
    delta = break_function(config.direction, fourier_basis(u, config.n_basis), c)
    t = np.arange(1, n + 1)[:, None]
    size = np.sqrt(t) * n**config.alpha / math.sqrt(n) if gradual else np.ones_like(t, dtype=float)
    x = size * (t > tau) * delta + eps
    y = x.mean(axis=0) + x
    return FunctionalTimeSeries(u, y, np.arange(1, n + 1)), tau


def dgp_abrupt(config: DgpConfig, rng: np.random.Generator) -> tuple[FunctionalTimeSeries, int]:
    """Mean shift by delta after a uniformly drawn tau, on VAR(1)-driven Fourier curves."""
    return _planted_break(config, rng, gradual=False)


def dgp_gradual(config: DgpConfig, rng: np.random.Generator) -> tuple[FunctionalTimeSeries, int]:
    """Shift sqrt(t) n^alpha / sqrt(n) delta for t > tau."""
    return _planted_break(config, rng, gradual=True)


def generate(config: DgpConfig, rng: np.random.Generator) -> tuple[FunctionalTimeSeries, int]:
    return {"far1": dgp_far1, "abrupt": dgp_abrupt, "gradual": dgp_gradual}[config.kind](config, rng)


def replication_rng(seed: int, rep: int) -> np.random.Generator:
    return np.random.default_rng([seed, rep])


@dataclass(frozen=True)
class RateDgpConfig:
    """Log10 rates ``a(x) + b(x) k_t + noise`` whose period index ``k_t``
    changes drift (and jumps by ``level_shift``) at ``break_year``."""

    ages: tuple = tuple(range(0, 100, 5))
    first_year: int = 1921
    last_year: int = 2020
    break_year: int = 1960
    drift_before: float = 0.0
    drift_after: float = -0.02
    level_shift: float = 0.0
    index_sd: float = 0.005
    noise_sd: float = 0.005

    def __post_init__(self):
        if not self.first_year + 3 <= self.break_year <= self.last_year:
            raise ValueError("break_year must lie inside the sample, after its first 3 years")


def synthetic_rate_table(config: RateDgpConfig, rng: np.random.Generator):
    """Mortality-like rate table with a planted change in the period trend."""
    from .rates import make_rate_table

    ages = np.asarray(config.ages, dtype=float)
    years = np.arange(config.first_year, config.last_year + 1)
    a = -4.0 + 0.03 * ages
    b = 0.5 + 0.5 * np.exp(-ages / 40.0)
    b = b / np.linalg.norm(b)
    drift = np.where(years < config.break_year, config.drift_before, config.drift_after)
    steps = drift + config.index_sd * rng.standard_normal(years.size)
    steps[0] = 0.0
    steps[years == config.break_year] += config.level_shift
    k = np.cumsum(steps) * np.sqrt(ages.size)
    log_rates = a[:, None] + b[:, None] * k[None, :] + config.noise_sd * rng.standard_normal((ages.size, years.size))
    return make_rate_table(np.asarray(config.ages), years, 10.0**log_rates)


# -- Monte Carlo --------------------------------------------------------------

Detector = Callable[[FunctionalTimeSeries], object]


def _ff_estimate(fts: FunctionalTimeSeries):
    return fts.label(locate_break(cusum_trajectory(fts)) - 1)


def _isfe_estimate(fts: FunctionalTimeSeries):
    return detect_isfe(fts).break_label


def _isfe_lc_estimate(fts: FunctionalTimeSeries):
    return detect_isfe(fts, "lc").break_label


DETECTORS: dict[str, Detector] = {"ff": _ff_estimate, "isfe": _isfe_estimate, "isfe_lc": _isfe_lc_estimate}


@dataclass
class MethodSummary:
    mean: float
    median: float
    sd: float
    mse: float
    n_ok: int
    n_failed: int


@dataclass
class SimulationSummary:
    """Per-method summaries of the estimated change points, plus the raw draws."""

    config: dict
    reps: int
    seed: int
    tau: list
    estimates: dict
    methods: dict = field(default_factory=dict)
    tau_mean: float = float("nan")
    tau_median: float = float("nan")
    tau_sd: float = float("nan")
    flags: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def _sd(x: np.ndarray) -> float:
    return float(np.std(x, ddof=1)) if x.size > 1 else 0.0


def summarize(tau: Sequence[int], estimates: Sequence) -> MethodSummary:
    """mean/median/sd of the estimates and MSE against the per-replication truth;
    failed replications (None) are excluded and counted."""
    ok = [(float(e), float(t)) for e, t in zip(estimates, tau) if e is not None]
    failed = len(estimates) - len(ok)
    if not ok:
        nan = float("nan")
        return MethodSummary(nan, nan, nan, nan, 0, failed)
    est = np.array([e for e, _ in ok])
    truth = np.array([t for _, t in ok])
    return MethodSummary(
        mean=float(est.mean()),
        median=float(np.median(est)),
        sd=_sd(est),
        mse=float(np.mean((est - truth) ** 2)),
        n_ok=len(ok),
        n_failed=failed,
    )


def run_replication(config: DgpConfig, methods: Sequence[str], seed: int, rep: int) -> tuple[int, list]:
    fts, tau = generate(config, replication_rng(seed, rep))
    out = []
    for m in methods:
        detector = DETECTORS[m] if isinstance(m, str) else m
        try:
            est = detector(fts)
            out.append(None if est is None else int(est))
        except Exception:
            out.append(None)
    return tau, out


def monte_carlo(
    config: DgpConfig,
    methods: Sequence[Union[str, Detector]] = ("ff", "isfe"),
    reps: int = 200,
    seed: int = 0,
    n_jobs: int = 1,
) -> SimulationSummary:
    """Replicate ``config`` ``reps`` times and summarize each detector.

    Replication i uses the generator seeded by ``(seed, i)``, so the summary
    does not depend on ``n_jobs`` or execution order.
    """
    if reps < 1:
        raise ValueError("reps must be at least 1")
    for m in methods:
        if isinstance(m, str) and m not in DETECTORS:
            raise ValueError(f"unknown method {m!r}; expected one of {sorted(DETECTORS)}")
    if n_jobs == 1:
        results = [run_replication(config, methods, seed, i) for i in range(reps)]
    else:
        from joblib import Parallel, delayed

        results = Parallel(n_jobs=n_jobs)(delayed(run_replication)(config, methods, seed, i) for i in range(reps))
    tau = [int(t) for t, _ in results]
    names = [m if isinstance(m, str) else getattr(m, "__name__", f"method{i}") for i, m in enumerate(methods)]
    estimates = {name: [r[1][i] for r in results] for i, name in enumerate(names)}
    summary = SimulationSummary(
        config=asdict(config),
        reps=reps,
        seed=seed,
        tau=tau,
        estimates=estimates,
        methods={name: summarize(tau, est) for name, est in estimates.items()},
        tau_mean=float(np.mean(tau)),
        tau_median=float(np.median(tau)),
        tau_sd=_sd(np.array(tau, dtype=float)),
    )
    if reps == 1:
        summary.flags.append("single replication: sd reported as 0")
    for name, s in summary.methods.items():
        if s.n_failed:
            summary.flags.append(f"{name}: {s.n_failed} failed replication(s) excluded")
    return summary

