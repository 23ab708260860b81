"""Holdout MAPE by training period on synthetic rate tables with a drift break."""

import argparse

from ftsbreak.evaluation import FULL_SAMPLE, EvaluationConfig, run_evaluation
from ftsbreak.simlab import RateDgpConfig, replication_rng, synthetic_rate_table


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--reps", type=int, default=50)
    p.add_argument("--seed", type=int, default=2007)
    p.add_argument("--split-year", type=int, default=2010)
    p.add_argument("--break-year", type=int, default=1960)
    p.add_argument("--forecaster", choices=("lc", "fpcr"), default="lc")
    p.add_argument("--null-reps", type=int, default=500)
    args = p.parse_args(argv)
    cfg = RateDgpConfig(break_year=args.break_year)
    wins = {}
    for r in range(args.reps):
        table = synthetic_rate_table(cfg, replication_rng(args.seed, r))
        payload = run_evaluation(table, args.split_year, EvaluationConfig(forecaster=args.forecaster, reps=args.null_reps, seed=r)).payload
        m = payload["mape"]
        for name, v in m.items():
            if name != FULL_SAMPLE:
                wins[name] = wins.get(name, 0) + (v < m[FULL_SAMPLE])
    for name, w in sorted(wins.items()):
        print(f"{name:<12} truncated MAPE below full sample in {w}/{args.reps}")


if __name__ == "__main__":
    main()
