"""Change-point detection and forecasting for functional time series."""

__version__ = "0.1.0"

from .cusum import ChangePointResult, cusum_trajectory, detect_ff, kpss_test, null_distribution
from .errors import DataError, DegenerateError
from .evaluation import EvaluationConfig, evaluate_mape, run_evaluation
from .fda import Curve, FunctionalTimeSeries, make_fts
from .fpcr import FPCRModel, fit_fpcr, fit_lee_carter
from .isfe import detect_isfe, isfe_series, ssr_breakpoint
from .longrun import KernelSpec, long_run_covariance
from .rates import RateTable, read_rates_csv, to_fts
from .report import Report, read_report_json, write_report_json
from .simlab import DgpConfig, monte_carlo
from .spectral import eigendecompose, eigenvalue_ratio_r

__all__ = [
    "ChangePointResult",
    "Curve",
    "DataError",
    "DegenerateError",
    "DgpConfig",
    "EvaluationConfig",
    "FPCRModel",
    "FunctionalTimeSeries",
    "KernelSpec",
    "RateTable",
    "Report",
    "cusum_trajectory",
    "detect_ff",
    "detect_isfe",
    "eigendecompose",
    "eigenvalue_ratio_r",
    "evaluate_mape",
    "fit_fpcr",
    "fit_lee_carter",
    "isfe_series",
    "kpss_test",
    "long_run_covariance",
    "make_fts",
    "monte_carlo",
    "null_distribution",
    "read_rates_csv",
    "read_report_json",
    "run_evaluation",
    "ssr_breakpoint",
    "to_fts",
    "write_report_json",
]
