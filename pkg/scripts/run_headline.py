#!/usr/bin/env python3
"""Headline strategy comparison: InfoGain / EPMV / MCMV / Random.

Runs the paired simulated-search experiment (every strategy sees the same
hidden user point per trial) and prints the mean MSE and ranking-tau trends.
Defaults match the acceptance configuration; expect a few minutes of
runtime at full size.
"""

import argparse
import time

from prefsearch.harness import ExperimentConfig, run_experiment


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="runs/headline", help="output directory")
    ap.add_argument("--n-items", type=int, default=200)
    ap.add_argument("--dim", type=int, default=2)
    ap.add_argument("--k0", type=float, default=20.0)
    ap.add_argument("--lam", type=float, default=60.0,
                    help="penalty weight; keep comparable to k0 * posterior spread")
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--queries", type=int, default=30)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    cfg = ExperimentConfig(experiment_id="headline",
                           n_items=args.n_items, dim=args.dim,
                           strategies=("infogain", "epmv", "mcmv", "random"),
                           k0=args.k0, lam=args.lam, trials=args.trials,
                           queries=args.queries, seed=args.seed)
    t0 = time.perf_counter()
    result = run_experiment(cfg, out_dir=args.out, threads=args.threads)
    elapsed = time.perf_counter() - t0

    print(f"{cfg.trials} trials x {cfg.queries} queries, k0={cfg.k0}, "
          f"lam={cfg.lam}, {elapsed:.0f}s")
    marks = sorted({q for q in (1, 5, 10, 20, cfg.queries) if q <= cfg.queries})
    print(f"{'strategy':>10} " + " ".join(f"q{q:>2}" for q in marks) + "   (mean mse)")
    for sid in cfg.strategies:
        series = result.mean_series(sid, "mse")
        print(f"{sid:>10} " + " ".join(f"{series[q - 1]:.3f}" for q in marks))
    print(f"{'strategy':>10} tau@1 -> tau@{cfg.queries}")
    for sid in cfg.strategies:
        taus = result.mean_series(sid, "tau")
        print(f"{sid:>10} {taus[0]:.3f} -> {taus[-1]:.3f}")
    print(f"results written to {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
