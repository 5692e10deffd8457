"""Command-line entry points: run, bounds, fit-k0, prep-embedding, serve."""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import yaml

from .embedding import load_embedding, load_triplets, prepare_embedding, fit_k0, triplet_error_fraction
from .harness import BoundSuiteConfig, ExperimentConfig, run_bound_suite, run_experiment
from .response_model import NoiseSchemeConfig


def _config_from_file(path, cls):
    raw = yaml.safe_load(Path(path).read_text()) or {}
    if not isinstance(raw, dict):
        raise SystemExit(f"config {path} must be a mapping of field names to values")
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(raw) - names
    if unknown:
        raise SystemExit(f"unknown config keys for {cls.__name__}: {sorted(unknown)}")
    if cls is BoundSuiteConfig and isinstance(raw.get("experiment"), dict):
        raw["experiment"] = ExperimentConfig(**raw["experiment"])
    return cls(**raw)


def _cmd_run(args):
    cfg = _config_from_file(args.config, ExperimentConfig) if args.config else ExperimentConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    result = run_experiment(cfg, out_dir=args.out, threads=args.threads)
    for sid in cfg.strategies:
        final = result.mean_series(sid, "mse")[-1]
        print(f"{cfg.experiment_id} {sid}: mean mse at query {cfg.queries} = {final:.6g}")
    if args.out:
        print(f"results written to {args.out}")
    return 0


def _cmd_bounds(args):
    cfg = _config_from_file(args.config, BoundSuiteConfig) if args.config else BoundSuiteConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    checks = run_bound_suite(cfg, out_dir=args.out)
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name} margin={c.margin:.6g}")
    return 0 if all(c.passed for c in checks) else 1


def _cmd_fit_k0(args):
    emb = load_embedding(args.embedding)
    if not args.raw:
        emb = prepare_embedding(emb)
    triplets = load_triplets(args.triplets)
    k0 = fit_k0(emb, triplets, NoiseSchemeConfig(args.scheme, 1.0))
    err = triplet_error_fraction(emb, triplets)
    print(f"scheme={args.scheme} k0={k0!r} triplet_error_fraction={err!r}")
    return 0


def _cmd_prep_embedding(args):
    emb = prepare_embedding(load_embedding(args.input))
    with open(args.out, "w") as fh:
        for row in emb.items:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
    print(f"prepared {emb.n_items} items (dim {emb.dim}), scale={emb.scale_applied!r} -> {args.out}")
    return 0


def _cmd_serve(args):
    import uvicorn

    from .service import EmbeddingRegistry, create_app

    registry = EmbeddingRegistry.from_directory(args.embeddings, prepare=not args.raw)
    app = create_app(registry, store_path=args.store)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="prefsearch",
                                     description="active paired-comparison preference search")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a simulated-search experiment")
    p.add_argument("config", nargs="?", help="YAML file mirroring ExperimentConfig fields")
    p.add_argument("--out", default=None, help="directory for results/aggregate/timings/metadata")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--threads", type=int, default=1, help="worker processes for trials")
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("bounds", help="run the bound-verification suite")
    p.add_argument("config", nargs="?", help="YAML file mirroring BoundSuiteConfig fields")
    p.add_argument("--out", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(fn=_cmd_bounds)

    p = sub.add_parser("fit-k0", help="fit the noise constant from answered triplets")
    p.add_argument("--embedding", required=True)
    p.add_argument("--triplets", required=True)
    p.add_argument("--scheme", default="constant", choices=("constant", "normalized", "decaying"))
    p.add_argument("--raw", action="store_true", help="skip preparation scaling")
    p.set_defaults(fn=_cmd_fit_k0)

    p = sub.add_parser("prep-embedding", help="center and rescale a coordinate table")
    p.add_argument("input")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_prep_embedding)

    p = sub.add_parser("serve", help="serve live sessions over HTTP")
    p.add_argument("--embeddings", required=True, help="directory of *.csv / *.txt tables")
    p.add_argument("--store", default=None, help="event-log file for session persistence")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--raw", action="store_true", help="serve tables without preparation scaling")
    p.set_defaults(fn=_cmd_serve)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
