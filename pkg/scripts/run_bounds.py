#!/usr/bin/env python3
"""Numeric verification of the error and information bounds.

Checks, in order: the differential-entropy sandwich around the sampled
posterior, the equiprobable-query information floor, the mean-cut deviation
cap and its limiting constants, the MSE lower bound on a small experiment,
and the stopping-time sandwich for the continuous selection loop.
"""

import argparse
import time

from prefsearch.harness import BoundSuiteConfig, ExperimentConfig, run_bound_suite

CHECKS = ("lemma1", "prop1", "prop2", "theorem2", "theorem3")


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="runs/bounds", help="report directory")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--checks", nargs="+", default=list(CHECKS), choices=CHECKS)
    ap.add_argument("--quick", action="store_true",
                    help="smaller grids and fewer runs; minutes down to seconds")
    args = ap.parse_args()

    cfg = BoundSuiteConfig(seed=args.seed, checks=tuple(args.checks))
    if args.quick:
        cfg.gaussian_covs = 6
        cfg.entropy_samples = 3000
        cfg.grid_k = (1.0, 5.0)
        cfg.grid_sigma = (0.1, 0.5)
        cfg.grid_samples = 2000
        cfg.t3_runs = 5
        cfg.experiment = ExperimentConfig(experiment_id="bounds-quick", n_items=40,
                                          strategies=("random",), trials=3,
                                          queries=10, sample_count=400,
                                          batch_size=10, ranking_batches=20,
                                          seed=args.seed)
    t0 = time.perf_counter()
    checks = run_bound_suite(cfg, out_dir=args.out)
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name} (worst margin {c.margin:.4g})")
    print(f"{time.perf_counter() - t0:.0f}s; report in {args.out}")
    return 0 if all(c.passed for c in checks) else 1


if __name__ == "__main__":
    raise SystemExit(main())
