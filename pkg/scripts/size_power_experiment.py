#!/usr/bin/env python3
"""Empirical size and power of the multi-window changepoint test.

Generates synthetic mean-change data (at-most-one-change design with the
changepoint at a fixed fraction of n), runs the permutation test, and reports
rejection rates under the null and the alternative.

Desk-scale defaults finish in a couple of minutes. Full-table settings
(--d 100 --reps 1000, all three laws) take hours single-threaded:

    python scripts/size_power_experiment.py --n 200 --d 100 --reps 1000
"""

import argparse
import time

from artcp import (
    ChangeDesign,
    Dataset,
    RunConfig,
    gen_mean_change,
    run_test,
)

LAW_SCALES = {"normal": 0.25, "t3": 3.0, "lognormal": 5.0}


def rejection_rate(args, law: str, k_star: int) -> float:
    taus = (int(args.tau_frac * args.n),) if k_star else ()
    rejections = 0
    for rep in range(args.reps):
        design = ChangeDesign(
            model="mean",
            n=args.n,
            d=args.d,
            tau_star=taus,
            s=min(args.s, args.d),
            c_theta=args.c_theta,
            c_p=LAW_SCALES[law],
            error_law=law,
            seed=args.seed + rep,
        )
        data = gen_mean_change(design).dataset
        config = RunConfig(
            transform="identity" if args.d == 1 else "kmeans",
            screen="none" if args.d <= 10 else "top_fraction",
            h=max(2, int(args.h_frac * args.n)),
            alpha=args.alpha,
            B=args.B,
            seed=args.seed + rep,
            threads=args.threads,
        )
        rejections += run_test(data=data, config=config)["reject"]
    return rejections / args.reps


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=200)
    parser.add_argument("--d", type=int, default=1)
    parser.add_argument("--reps", type=int, default=200)
    parser.add_argument("--B", type=int, default=200)
    parser.add_argument("--alpha", type=float, default=0.1)
    parser.add_argument("--s", type=int, default=3)
    parser.add_argument("--c-theta", type=float, default=0.3)
    parser.add_argument("--tau-frac", type=float, default=0.4)
    parser.add_argument("--h-frac", type=float, default=0.1)
    parser.add_argument("--laws", nargs="+", default=["normal", "t3", "lognormal"])
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args()

    print(f"n={args.n} d={args.d} reps={args.reps} B={args.B} alpha={args.alpha}")
    print(f"{'law':<12}{'size':>8}{'power':>8}{'secs':>8}")
    for law in args.laws:
        start = time.time()
        size = rejection_rate(args, law, k_star=0)
        power = rejection_rate(args, law, k_star=1)
        print(f"{law:<12}{size:>8.3f}{power:>8.3f}{time.time() - start:>8.1f}")


if __name__ == "__main__":
    main()
