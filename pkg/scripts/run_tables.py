"""Monte-Carlo tables for the simulation designs (FAR(1), abrupt change, gradual change).

Example::

    python3 scripts/run_tables.py --design abrupt --reps 200 --seed 1 --jobs 1
"""

import argparse
import time

from ftsbreak.simlab import DgpConfig, monte_carlo

DESIGNS = {
    "far1": [dict(kind="far1", n=101, omega=w) for w in (0.1, 0.5, 0.9)],
    "abrupt": [dict(kind="abrupt", n=100, snr=s, a_kind=a) for a in ("band", "diag") for s in (0.01, 0.1, 0.5, 0.9)],
    "gradual": [dict(kind="gradual", n=100, snr=s, a_kind="band") for s in (0.01, 0.1, 0.5, 0.9)],
}


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--design", choices=sorted(DESIGNS), required=True)
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--methods", default="ff,isfe")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--far1-offset", choices=("inside", "outside"), default="inside")
    args = p.parse_args(argv)
    methods = tuple(args.methods.split(","))
    print(f"{'setting':<28}{'method':<8}{'mean':>8}{'median':>8}{'sd':>8}{'MSE':>10}{'failed':>8}")
    for kw in DESIGNS[args.design]:
        if kw["kind"] == "far1":
            kw = dict(kw, far1_offset=args.far1_offset)
        start = time.perf_counter()
        s = monte_carlo(DgpConfig(**kw), methods, reps=args.reps, seed=args.seed, n_jobs=args.jobs)
        label = ",".join(f"{k}={v}" for k, v in kw.items() if k not in ("kind", "n", "far1_offset"))
        for name, m in s.methods.items():
            print(f"{label:<28}{name:<8}{m.mean:8.2f}{m.median:8.1f}{m.sd:8.2f}{m.mse:10.2f}{m.n_failed:8d}")
        print(f"{'':<28}true tau mean {s.tau_mean:.2f}, {time.perf_counter() - start:.0f} s")


if __name__ == "__main__":
    main()
