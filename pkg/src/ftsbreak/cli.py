"""Command-line interface: ``ftsbreak {simulate,detect,forecast,evaluate}``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
Every report echoes the seed it ran with.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .cusum import DEFAULT_REPS, detect_ff, kpss_test
from .errors import DataError, DegenerateError
from .evaluation import EvaluationConfig, run_evaluation
from .fpcr import fit_fpcr, fit_lee_carter
from .isfe import detect_isfe
from .longrun import KERNEL_FAMILIES, KernelSpec
from .rates import read_rates_csv, to_fts
from .report import Report, write_report_json
from .simlab import DgpConfig, monte_carlo

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3
DEFAULT_SEED = 0


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _bandwidth(text: str):
    if text == "auto":
        return "auto"
    try:
        h = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bandwidth must be 'auto' or a positive number, got {text!r}") from None
    if h <= 0:
        raise argparse.ArgumentTypeError("bandwidth must be positive")
    return h


def _methods(text: str) -> tuple:
    items = tuple(m.strip() for m in text.split(",") if m.strip())
    if not items:
        raise argparse.ArgumentTypeError("at least one method is required")
    return items


def _add_input(p):
    p.add_argument("--input", required=True, help="rate table CSV")
    p.add_argument("--layout", choices=("wide", "long"), default="wide")
    p.add_argument("--transform", choices=("none", "log10"), default="log10")
    p.add_argument("--zero-policy", choices=("half_min", "offset", "error"), default="half_min")


def _add_common(p, seed_required=False):
    if seed_required:
        p.add_argument("--seed", type=int, required=True)
    else:
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", default="-", help="report path; '-' writes to stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ftsbreak", description="Change-point detection and forecasting for curve time series.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="Monte-Carlo study of the detectors on a synthetic design")
    p.add_argument("--dgp", choices=("far1", "abrupt", "gradual"), required=True)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--snr", type=float, default=0.5)
    p.add_argument("--omega", type=float, default=0.1)
    p.add_argument("--a-kind", choices=("band", "diag"), default="band")
    p.add_argument("--alpha", type=float, default=0.5, help="gradual-change exponent")
    p.add_argument("--direction", type=int, default=1)
    p.add_argument("--trace", choices=("matrix", "quadrature"), default="matrix")
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--methods", type=_methods, default=("ff", "isfe"))
    p.add_argument("--jobs", type=int, default=1, help="parallel workers; results do not depend on it")
    _add_common(p, seed_required=True)

    p = sub.add_parser("detect", help="detect a change in a rate table")
    _add_input(p)
    p.add_argument("--method", choices=("ff", "isfe", "kpss"), default="ff")
    p.add_argument("--level", type=float, default=0.05)
    p.add_argument("--kernel", choices=KERNEL_FAMILIES, default="bartlett")
    p.add_argument("--bandwidth", type=_bandwidth, default="auto")
    p.add_argument("--reps", type=int, default=DEFAULT_REPS)
    p.add_argument("--forecaster", choices=("fpcr", "lc"), default="fpcr", help="forecaster used by isfe")
    _add_common(p)

    p = sub.add_parser("forecast", help="forecast future curves")
    _add_input(p)
    p.add_argument("--start-year", type=int, default=None)
    p.add_argument("--horizon", type=int, default=1)
    p.add_argument("--model", choices=("fpcr", "lc"), default="lc")
    _add_common(p)

    p = sub.add_parser("evaluate", help="holdout MAPE by training period")
    _add_input(p)
    p.add_argument("--split-year", type=int, required=True)
    p.add_argument("--start-year", type=int, default=None, help="extra user-chosen training start")
    p.add_argument("--detectors", type=_methods, default=("ff", "isfe"))
    p.add_argument("--forecaster", choices=("fpcr", "lc"), default="lc")
    p.add_argument("--compare", choices=("transformed", "raw"), default="transformed")
    p.add_argument("--level", type=float, default=0.05)
    p.add_argument("--reps", type=int, default=1000)
    _add_common(p)
    return parser


def _load(args):
    table = read_rates_csv(args.input, args.layout)
    fts = to_fts(table, args.transform, args.zero_policy)
    return table, fts


def _simulate(args) -> Report:
    if args.reps < 1:
        raise UsageError("--reps must be at least 1")
    cfg = DgpConfig(
        kind=args.dgp,
        n=args.n,
        omega=args.omega,
        a_kind=args.a_kind,
        snr=args.snr,
        alpha=args.alpha,
        direction=args.direction,
        trace=args.trace,
    )
    summary = monte_carlo(cfg, args.methods, reps=args.reps, seed=args.seed, n_jobs=args.jobs)
    params = {"dgp": args.dgp, "reps": args.reps, "methods": list(args.methods), "config": summary.config}
    return Report("simulate", params, summary.to_dict(), seed=args.seed)


def _detect(args) -> Report:
    table, fts = _load(args)
    params = {"transform": args.transform, "layout": args.layout}
    if args.method in ("ff", "kpss"):
        kernel = KernelSpec(args.kernel, bandwidth=args.bandwidth)
        params.update(kernel=args.kernel, bandwidth=args.bandwidth, reps=args.reps)
    if args.method == "ff":
        res = detect_ff(fts, level=args.level, kernel=kernel, reps=args.reps, seed=args.seed)
        params["level"] = args.level
    elif args.method == "kpss":
        k = kpss_test(fts, kernel=kernel, reps=args.reps, seed=args.seed)
        payload = {"statistic": k.statistic, "p_value": k.p_value}
        return Report("kpss", params, payload, seed=args.seed, input_fingerprint=table.fingerprint)
    else:
        res = detect_isfe(fts, args.forecaster)
        params["forecaster"] = args.forecaster
    payload = {
        "statistic": res.statistic,
        "p_value": res.p_value,
        "reject": res.reject,
        "break_index": res.break_index,
        "break_label": res.break_label,
        "degenerate": res.degenerate,
        "trajectory": res.trajectory,
        "labels": [fts.label(t) for t in range(fts.n)],
        "details": res.details,
    }
    return Report(res.method, params, payload, seed=args.seed, input_fingerprint=table.fingerprint)


def _forecast(args) -> Report:
    table, fts = _load(args)
    if args.horizon < 1:
        raise UsageError("--horizon must be at least 1")
    years = np.array([fts.label(t) for t in range(fts.n)])
    if args.start_year is not None:
        lo = int(np.searchsorted(years, args.start_year))
        if lo >= fts.n:
            raise DataError(f"start year {args.start_year} is after the last year {years[-1]}")
        fts = fts.window(lo, fts.n)
    model = fit_fpcr(fts) if args.model == "fpcr" else fit_lee_carter(fts)
    curves = np.array([model.forecast(h).values for h in range(1, args.horizon + 1)])
    payload = {
        "ages": fts.grid,
        "years": [int(fts.label(fts.n - 1)) + h for h in range(1, args.horizon + 1)],
        "forecasts": curves,
        "r": model.r,
        "K": model.K,
        "score_kinds": model.score_kinds(),
        "training_years": [int(fts.label(0)), int(fts.label(fts.n - 1))],
    }
    if args.transform == "log10":
        payload["forecasts_raw"] = 10.0**curves
    params = {"model": args.model, "horizon": args.horizon, "start_year": args.start_year, "transform": args.transform}
    return Report("forecast", params, payload, seed=args.seed, input_fingerprint=table.fingerprint)


def _evaluate(args) -> Report:
    table = read_rates_csv(args.input, args.layout)
    cfg = EvaluationConfig(
        detectors=args.detectors,
        forecaster=args.forecaster,
        transform=args.transform,
        compare=args.compare,
        user_start=args.start_year,
        level=args.level,
        reps=args.reps,
        seed=args.seed,
        zero_policy=args.zero_policy,
    )
    return run_evaluation(table, args.split_year, cfg)


COMMANDS = {"simulate": _simulate, "detect": _detect, "forecast": _forecast, "evaluate": _evaluate}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        report = COMMANDS[args.command](args)
        if args.out == "-":
            sys.stdout.write(report.dumps())
        else:
            write_report_json(report, args.out)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (DegenerateError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"ftsbreak: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DataError, ValueError, OSError) as exc:
        print(f"ftsbreak: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
