"""Empirical size of the FF and KPSS tests on i.i.d. smooth curves."""

import argparse

import numpy as np

from ftsbreak.cusum import detect_ff, kpss_test
from ftsbreak.fda import make_fts
from ftsbreak.longrun import KERNEL_FAMILIES, KernelSpec
from ftsbreak.simlab import fourier_basis

GRID = np.linspace(0.0, 1.0, 101)
SD = np.array([1.0, 0.8, 0.6, 0.4, 0.2])


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--reps", type=int, default=500)
    p.add_argument("--null-reps", type=int, default=1000)
    p.add_argument("--level", type=float, default=0.05)
    p.add_argument("--kernel", choices=KERNEL_FAMILIES, default="bartlett")
    p.add_argument("--ar", type=float, default=0.0, help="AR(1) coefficient of the scores")
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    basis = fourier_basis(GRID, SD.size)
    kernel = KernelSpec(args.kernel)
    ff = kpss = 0
    for r in range(args.reps):
        rng = np.random.default_rng([args.seed, r])
        z = rng.standard_normal((args.n, SD.size)) * SD
        for t in range(1, args.n):
            z[t] += args.ar * z[t - 1]
        fts = make_fts(GRID, z @ basis)
        ff += detect_ff(fts, level=args.level, kernel=kernel, reps=args.null_reps, seed=r).reject
        kpss += kpss_test(fts, kernel=kernel, reps=args.null_reps, seed=r).p_value < args.level
    print(f"n={args.n} reps={args.reps} kernel={args.kernel} ar={args.ar}")
    print(f"FF rejection rate   {ff / args.reps:.3f}")
    print(f"KPSS rejection rate {kpss / args.reps:.3f}")


if __name__ == "__main__":
    main()
