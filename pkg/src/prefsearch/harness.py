"""Deterministic experiment harness: simulated searches, files, bound checks.

Every trial derives its RNG streams from (master seed, strategy index,
trial index), so reruns of the same config are bit-identical and trials can
be farmed out to worker processes without changing any output byte.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .baselines import (GaussCloudState, Polytope, actrank_select, actrank_update,
                        chebyshev_center, gausscloud_select, majority_vote)
from .bounds import lemma1_bounds, mse_lower_bound, prop1_lower, prop2_bounds, theorem3_bounds
from .embedding import Embedding, load_embedding, load_triplets, prepare_embedding, fit_k0
from .metrics import mse, ranking_metric
from .posterior import (PosteriorBatch, ResponseHistory, posterior_entropy_estimate,
                        sample_posterior)
from .response_model import (NoiseSchemeConfig, OracleConfig, hyperplane_pair, logistic,
                             simulate_response)
from .strategies import (QueryPool, SearchSession, StrategyConfig, continuous_epmv_query,
                         info_gain_utility, run_step, top_eigenvector)

BAYES_KINDS = ("infogain", "epmv", "mcmv", "random")


class ExperimentError(RuntimeError):
    """Experiment-level failure (bad config, too many aborted trials)."""


@dataclass
class ExperimentConfig:
    """Everything a simulated-search experiment needs, seed included."""

    experiment_id: str = "exp"
    embedding_path: str | None = None   # None -> synthetic Gaussian items
    n_items: int = 200
    dim: int = 2
    strategies: tuple = ("infogain", "epmv", "mcmv", "random")
    noise_family: str = "logistic"
    scheme: str = "constant"
    k0: float = 20.0
    fit_k0_from: str | None = None      # triplet file; overrides k0 when set
    trials: int = 20
    queries: int = 30
    sample_count: int = 1000
    beta: float | None = None           # None -> min(1, 2000 / |pool|)
    lam: float = 1.0
    batch_size: int = 15
    ranking_batches: int = 100
    prior_halfwidth: float = 1.0
    seed: int = 0

    def __post_init__(self):
        self.strategies = tuple(self.strategies)
        for s in self.strategies:
            parse_strategy_id(s)
        if self.trials < 1 or self.queries < 1:
            raise ExperimentError("trials and queries must be positive")


def parse_strategy_id(strategy_id: str) -> tuple[str, int | None]:
    """Split 'name' or 'name-N' into (kind, N); N is votes/stages for baselines."""
    base, dash, suffix = strategy_id.partition("-")
    if base in BAYES_KINDS:
        if dash:
            raise ExperimentError(f"strategy {strategy_id!r} takes no suffix")
        return base, None
    if base in ("actrank", "gausscloud"):
        if not dash:
            return base, 1 if base == "actrank" else 2
        if not suffix.isdigit() or int(suffix) < 1:
            raise ExperimentError(f"bad strategy suffix in {strategy_id!r}")
        n = int(suffix)
        if base == "actrank" and n % 2 == 0:
            raise ExperimentError("actrank vote count must be odd")
        return base, n
    raise ExperimentError(f"unknown strategy id {strategy_id!r}")


@dataclass
class TrialRecord:
    strategy: str
    trial: int
    mse_series: list = field(default_factory=list)
    tau_series: list = field(default_factory=list)
    wall_ms_series: list = field(default_factory=list)
    aborted: str | None = None


def generate_synthetic_embedding(n_items: int, dim: int, seed: int = 0) -> Embedding:
    """Standard-normal item cloud run through the preparation scaling."""
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(90,)))
    return prepare_embedding(Embedding(items=rng.standard_normal((n_items, dim))))


def _load_experiment_embedding(cfg: ExperimentConfig) -> Embedding:
    if cfg.embedding_path is not None:
        return prepare_embedding(load_embedding(cfg.embedding_path))
    return generate_synthetic_embedding(cfg.n_items, cfg.dim, seed=cfg.seed)


def _resolve_k0(cfg: ExperimentConfig, emb: Embedding) -> float:
    if cfg.fit_k0_from is not None:
        triplets = load_triplets(cfg.fit_k0_from)
        return fit_k0(emb, triplets, NoiseSchemeConfig(cfg.scheme, 1.0))
    return float(cfg.k0)


def _default_beta(cfg: ExperimentConfig, pool: QueryPool) -> float:
    if cfg.beta is not None:
        return float(cfg.beta)
    return min(1.0, 2000.0 / max(1, pool.total_pairs))


def _trial_streams(cfg: ExperimentConfig, strategy_index: int, trial: int):
    # paired design: the hidden point is shared by every strategy in a trial,
    # the remaining streams are private to the (strategy, trial) cell; key
    # lengths (1 embedding, 2 hidden point, 3 cell) keep the streams disjoint
    w_seq = np.random.SeedSequence(cfg.seed, spawn_key=(91, trial))
    root = np.random.SeedSequence(cfg.seed, spawn_key=(92, strategy_index, trial))
    oracle_seq, session_seq, tau_seq = root.spawn(3)
    return w_seq, oracle_seq, session_seq, tau_seq


def run_trial(cfg: ExperimentConfig, emb: Embedding, pool: QueryPool, k0: float,
              strategy_id: str, strategy_index: int, trial: int) -> TrialRecord:
    """One simulated search; returns per-query metric series."""
    kind, extra = parse_strategy_id(strategy_id)
    w_seq, oracle_seq, session_seq, tau_seq = _trial_streams(cfg, strategy_index, trial)
    hw = cfg.prior_halfwidth
    true_w = np.random.default_rng(w_seq).uniform(-hw, hw, emb.dim)
    scheme = NoiseSchemeConfig(cfg.scheme, k0)
    oracle = OracleConfig(cfg.noise_family, scheme, true_w, seed=0)
    oracle_rng = np.random.default_rng(oracle_seq)
    tau_rng = np.random.default_rng(tau_seq)
    responder = lambda pair: simulate_response(pair, oracle, oracle_rng)
    record = TrialRecord(strategy=strategy_id, trial=trial)

    def log_point(estimate, wall_ms):
        record.mse_series.append(mse(true_w, estimate))
        record.tau_series.append(ranking_metric(true_w, estimate, emb,
                                                batch_size=cfg.batch_size,
                                                batches=cfg.ranking_batches, rng=tau_rng))
        record.wall_ms_series.append(wall_ms)

    if kind in BAYES_KINDS:
        strategy = StrategyConfig(kind=kind, lam=cfg.lam, beta=_default_beta(cfg, pool),
                                  sample_count=cfg.sample_count)
        session = SearchSession(pool, strategy, seed=session_seq, prior_halfwidth=hw)
        for _ in range(cfg.queries):
            t0 = time.perf_counter()
            run_step(session, responder)
            log_point(session.estimate, (time.perf_counter() - t0) * 1e3)
    elif kind == "gausscloud":
        _run_gausscloud_trial(cfg, pool, extra, session_seq, responder, log_point, hw)
    else:
        _run_actrank_trial(cfg, pool, extra, session_seq, responder, log_point, hw)
    return record


def _run_gausscloud_trial(cfg, pool, stages, session_seq, responder, log_point, hw):
    # selection follows the shrinking cloud; estimation reuses the Bayesian
    # posterior mean so the baseline differs only in how pairs are chosen
    select_seq, sampler_root = session_seq.spawn(2)
    rng = np.random.default_rng(select_seq)
    state = GaussCloudState(stages_total=stages,
                            queries_per_stage=max(1, math.ceil(cfg.queries / stages)),
                            initial_scale=hw,
                            current_center=np.zeros(pool.embedding.dim))
    history = ResponseHistory(dim=pool.embedding.dim, prior_halfwidth=hw)
    for _ in range(cfg.queries):
        t0 = time.perf_counter()
        pair = gausscloud_select(state, pool, rng)
        history.append(pair, responder(pair))
        batch = sample_posterior(history, size=cfg.sample_count,
                                 seed=sampler_root.spawn(1)[0])
        state.current_center = batch.mean
        log_point(batch.mean, (time.perf_counter() - t0) * 1e3)


def _run_actrank_trial(cfg, pool, votes, session_seq, responder, log_point, hw):
    rng = np.random.default_rng(session_seq.spawn(1)[0])
    poly = Polytope.box(pool.embedding.dim, hw)
    estimate, _ = chebyshev_center(poly)
    asked = 0
    while asked < cfg.queries:
        t0 = time.perf_counter()
        pair = actrank_select(poly, pool, rng)
        ballots = []
        while len(ballots) < votes and asked < cfg.queries:
            ballots.append(responder(pair))
            asked += 1
            if len(ballots) == votes:
                poly = actrank_update(poly, pair, majority_vote(ballots))
                estimate, _ = chebyshev_center(poly)
            log_point(estimate, (time.perf_counter() - t0) * 1e3)
            t0 = time.perf_counter()


def _run_one(cfg, emb, pool, k0, strategy_id, strategy_index, trial):
    try:
        return run_trial(cfg, emb, pool, k0, strategy_id, strategy_index, trial)
    except Exception as exc:  # aborted trial: recorded, counted, never silent
        return TrialRecord(strategy=strategy_id, trial=trial, aborted=f"{type(exc).__name__}: {exc}")


def _trial_task(args):
    cfg, emb, pool_spec, k0, strategy_id, strategy_index, trial = args
    pool = QueryPool(emb, NoiseSchemeConfig(cfg.scheme, k0))
    return _run_one(cfg, emb, pool, k0, strategy_id, strategy_index, trial)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    k0: float
    records: list
    aborted: list

    def series(self, strategy_id: str, which: str = "mse") -> np.ndarray:
        rows = [getattr(r, f"{which}_series") for r in self.records
                if r.strategy == strategy_id and r.aborted is None]
        return np.asarray(rows)

    def mean_series(self, strategy_id: str, which: str = "mse") -> np.ndarray:
        return self.series(strategy_id, which).mean(axis=0)


def run_experiment(cfg: ExperimentConfig, out_dir=None, threads: int = 1) -> ExperimentResult:
    """Run strategies x trials simulated searches; optionally write results.

    More than 20% aborted trials fails the experiment after the results and
    metadata for the surviving trials are written.
    """
    emb = _load_experiment_embedding(cfg)
    k0 = _resolve_k0(cfg, emb)
    pool = QueryPool(emb, NoiseSchemeConfig(cfg.scheme, k0))
    tasks = [(cfg, emb, None, k0, sid, si, t)
             for si, sid in enumerate(cfg.strategies) for t in range(cfg.trials)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool_exec:
            records = list(pool_exec.map(_trial_task, tasks))
    else:
        records = [_run_one(cfg, emb, pool, k0, sid, si, t)
                   for (_, _, _, _, sid, si, t) in tasks]
    # canonical order regardless of scheduling
    order = {sid: i for i, sid in enumerate(cfg.strategies)}
    records.sort(key=lambda r: (order[r.strategy], r.trial))
    aborted = [(r.strategy, r.trial, r.aborted) for r in records if r.aborted]
    result = ExperimentResult(config=cfg, k0=k0, records=records, aborted=aborted)
    if out_dir is not None:
        write_results(result, out_dir)
    if len(aborted) > 0.2 * len(records):
        raise ExperimentError(f"{len(aborted)} of {len(records)} trials aborted")
    return result


def _fmt(x: float) -> str:
    return repr(float(x))


def write_results(result: ExperimentResult, out_dir) -> None:
    """results.csv + aggregate.csv are canonical; timings.csv is advisory.

    Wall-clock times stay out of results.csv so identical (config, seed)
    reruns produce byte-identical canonical files.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg = result.config
    live = [r for r in result.records if r.aborted is None]

    with open(out / "results.csv", "w") as fh:
        fh.write("experiment,strategy,trial,query_index,mse,tau\n")
        for r in live:
            for qi, (m, t) in enumerate(zip(r.mse_series, r.tau_series), start=1):
                fh.write(f"{cfg.experiment_id},{r.strategy},{r.trial},{qi},{_fmt(m)},{_fmt(t)}\n")

    with open(out / "timings.csv", "w") as fh:
        fh.write("experiment,strategy,trial,query_index,wall_ms\n")
        for r in live:
            for qi, w in enumerate(r.wall_ms_series, start=1):
                fh.write(f"{cfg.experiment_id},{r.strategy},{r.trial},{qi},{_fmt(w)}\n")

    with open(out / "aggregate.csv", "w") as fh:
        fh.write("experiment,strategy,query_index,mse_mean,mse_se,tau_mean,tau_se\n")
        for sid in cfg.strategies:
            mses = result.series(sid, "mse")
            taus = result.series(sid, "tau")
            if mses.size == 0:
                continue
            n = mses.shape[0]
            for qi in range(mses.shape[1]):
                row = [cfg.experiment_id, sid, str(qi + 1),
                       _fmt(mses[:, qi].mean()), _fmt(mses[:, qi].std(ddof=1) / math.sqrt(n) if n > 1 else 0.0),
                       _fmt(taus[:, qi].mean()), _fmt(taus[:, qi].std(ddof=1) / math.sqrt(n) if n > 1 else 0.0)]
                fh.write(",".join(row) + "\n")

    meta = {
        "config": asdict(cfg) | {"strategies": list(cfg.strategies)},
        "k0_used": result.k0,
        "code_version": __version__,
        "aborted_trials": [list(a) for a in result.aborted],
        "notes": [],
    }
    if any(parse_strategy_id(s)[0] == "gausscloud" for s in cfg.strategies):
        meta["notes"].append(
            "gausscloud selection (sampled target, nearest hyperplane) and posterior-mean "
            "estimation are documented approximations of the cited staged method")
    with open(out / "metadata.yaml", "w") as fh:
        yaml.safe_dump(meta, fh, sort_keys=True)


# ---------------------------------------------------------------------------
# bound-verification suite


@dataclass
class BoundCheck:
    name: str
    passed: bool
    margin: float           # worst slack observed; >= 0 means the bound held
    details: dict = field(default_factory=dict)


@dataclass
class BoundSuiteConfig:
    seed: int = 0
    checks: tuple = ("lemma1", "prop1", "prop2", "theorem2", "theorem3")
    # lemma1 sandwich
    gaussian_covs: int = 20
    gaussian_dims: tuple = (2, 4, 8)
    entropy_samples: int = 8000
    entropy_tol_bits: float = 0.25
    # prop grids
    grid_k: tuple = (0.5, 1.0, 2.0, 5.0, 10.0)
    grid_sigma: tuple = (0.05, 0.1, 0.3, 0.6, 1.0)
    cs: tuple = (0.1, 0.5, 0.9)
    grid_samples: int = 4000
    info_slack_bits: float = 0.05
    # theorem2 experiment
    experiment: ExperimentConfig | None = None
    # theorem3 stopping runs
    t3_runs: int = 20
    t3_dim: int = 2
    t3_k_min: float = 10.0
    t3_epsilon: float = 1e-3
    t3_c: float = 0.5
    t3_halfwidth: float = 0.5
    t3_max_queries: int = 1500


def _random_covariance(rng: np.random.Generator, d: int) -> np.ndarray:
    """Random SPD matrix with eigenvalues log-uniform in [1/4, 4]."""
    q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    eigs = np.exp(rng.uniform(math.log(0.25), math.log(4.0), d))
    return (q * eigs) @ q.T


def check_lemma1(cfg: BoundSuiteConfig) -> BoundCheck:
    """Entropy sandwich + Gaussian equality case on random covariances."""
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(1,)))
    worst = math.inf
    rows = []
    for i in range(cfg.gaussian_covs):
        d = cfg.gaussian_dims[i % len(cfg.gaussian_dims)]
        cov = _random_covariance(rng, d)
        chol = np.linalg.cholesky(cov)
        samples = rng.standard_normal((cfg.entropy_samples, d)) @ chol.T
        batch = PosteriorBatch.from_samples(samples, ess=float(cfg.entropy_samples), seed=cfg.seed)
        est = posterior_entropy_estimate(batch)
        lower, upper = lemma1_bounds(cov)
        tol = cfg.entropy_tol_bits
        margin = min(est - (lower - tol), (upper + tol) - est, tol - abs(est - upper))
        worst = min(worst, margin)
        rows.append({"dim": d, "estimate": est, "lower": lower, "upper": upper})
    return BoundCheck("lemma1_entropy_sandwich", worst >= 0.0, worst, {"cases": rows})


def _grid_posterior_batch(dim, sigma_target, k_shape, seed_seq, size):
    """A genuine sampled posterior whose top-direction spread is ~sigma_target.

    Box prior scaled to the target spread plus two mild hyperplane responses
    keep the density log-concave but not uniform.
    """
    hw = sigma_target * math.sqrt(3.0)
    history = ResponseHistory(dim=dim, prior_halfwidth=hw)
    history.append(hyperplane_pair(np.full(dim, 1.0), 0.0, k_shape / hw), 0)
    history.append(hyperplane_pair(np.eye(dim)[0], hw / 2.0, k_shape / hw), 1)
    return sample_posterior(history, size=size, seed=seed_seq)


def check_prop1(cfg: BoundSuiteConfig) -> BoundCheck:
    """Equiprobable-query info floor over a (k, sigma) grid and c sweep."""
    root = np.random.SeedSequence(cfg.seed, spawn_key=(2,))
    seqs = iter(root.spawn(len(cfg.grid_k) * len(cfg.grid_sigma)))
    worst = math.inf
    rows = []
    for sigma_t in cfg.grid_sigma:
        for k in cfg.grid_k:
            batch = _grid_posterior_batch(2, sigma_t, 1.0, next(seqs), cfg.grid_samples)
            a, b = continuous_epmv_query(batch, k)
            pair = hyperplane_pair(a, b, k)
            info = info_gain_utility(pair, batch)
            sigma_hat = math.sqrt(float(a @ batch.covariance @ a))
            for c in cfg.cs:
                bound = prop1_lower(c, k, sigma_hat)
                margin = info - (bound - cfg.info_slack_bits)
                worst = min(worst, margin)
                rows.append({"k": k, "sigma_hat": sigma_hat, "c": c,
                             "info": info, "bound": bound})
    return BoundCheck("prop1_equiprobable_info_floor", worst >= 0.0, worst, {"cases": rows})


def check_prop2(cfg: BoundSuiteConfig) -> BoundCheck:
    """Mean-cut deviation cap and info floor, plus the limiting constants."""
    root = np.random.SeedSequence(cfg.seed, spawn_key=(3,))
    seqs = iter(root.spawn(len(cfg.grid_k) * len(cfg.grid_sigma)))
    worst = math.inf
    rows = []
    for sigma_t in cfg.grid_sigma:
        for k in cfg.grid_k:
            batch = _grid_posterior_batch(2, sigma_t, 1.0, next(seqs), cfg.grid_samples)
            a = top_eigenvector(batch.covariance)
            b = float(a @ batch.mean)
            pair = hyperplane_pair(a, b, k)
            sigma_hat = math.sqrt(float(a @ batch.covariance @ a))
            f1 = logistic(-k * (batch.samples @ a - b))
            p1 = float(f1.mean())
            ess = max(batch.ess, 1.0)
            mc_se = math.sqrt(max(p1 * (1.0 - p1), 1e-12) / ess)
            dev_bound, info_bound = prop2_bounds(k, sigma_hat)
            dev_margin = (dev_bound + 3.0 * mc_se) - abs(p1 - 0.5)
            info = info_gain_utility(pair, batch)
            info_margin = info - (info_bound - cfg.info_slack_bits)
            worst = min(worst, dev_margin, info_margin)
            rows.append({"k": k, "sigma_hat": sigma_hat, "p1": p1,
                         "dev_bound": dev_bound, "info": info, "info_bound": info_bound})
    # limiting constants at k sigma -> inf
    dev_inf, info_inf = prop2_bounds(1e12, 1.0)
    const_dev = abs(dev_inf - (math.e - 2.0) / (2.0 * math.e))
    hbe = -(1 / math.e) * math.log2(1 / math.e) - (1 - 1 / math.e) * math.log2(1 - 1 / math.e)
    const_info = abs(info_inf - hbe)
    consts_ok = const_dev < 5e-4 and const_info < 5e-4
    passed = worst >= 0.0 and consts_ok
    return BoundCheck("prop2_meancut_bounds", passed, worst,
                      {"cases": rows, "deviation_limit": dev_inf, "info_limit": info_inf})


def check_theorem2(result: ExperimentResult) -> BoundCheck:
    """Trial-averaged MSE never beats the floor by more than 10% MC slack."""
    d = result.config.dim
    worst = math.inf
    rows = []
    for sid in result.config.strategies:
        means = result.mean_series(sid, "mse")
        for qi, m in enumerate(means, start=1):
            bound = mse_lower_bound(d, qi)
            margin = m - 0.9 * bound
            worst = min(worst, margin)
            rows.append({"strategy": sid, "query": qi, "mse": float(m), "floor": bound})
    return BoundCheck("theorem2_mse_floor", worst >= 0.0, worst, {"cases": rows})


def run_continuous_epmv(true_w, k_min, epsilon, sample_count, seed,
                        prior_halfwidth=0.5, max_queries=1500):
    """Continuous EPMV until the posterior volume |Sigma|^(1/d) drops below epsilon.

    Returns (stop_index, volume_series).  Responses come from the matched
    logistic oracle with k = k_min on unit-normal hyperplanes.
    """
    true_w = np.asarray(true_w, dtype=float)
    d = true_w.shape[0]
    seed_seq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(int(seed))
    oracle_seq, sampler_root = seed_seq.spawn(2)
    oracle_rng = np.random.default_rng(oracle_seq)
    scheme = NoiseSchemeConfig("constant", k_min)
    oracle = OracleConfig("logistic", scheme, true_w, seed=0)
    history = ResponseHistory(dim=d, prior_halfwidth=prior_halfwidth)
    batch = sample_posterior(history, size=sample_count, seed=sampler_root.spawn(1)[0])
    volumes = []
    for i in range(1, max_queries + 1):
        a, b = continuous_epmv_query(batch, k_min)
        pair = hyperplane_pair(a, b, k_min)
        history.append(pair, simulate_response(pair, oracle, oracle_rng))
        batch = sample_posterior(history, size=sample_count, seed=sampler_root.spawn(1)[0])
        sign, logdet = np.linalg.slogdet(batch.covariance)
        vol = math.exp(logdet / d) if sign > 0 else 0.0
        volumes.append(vol)
        if vol < epsilon:
            return i, volumes
    return max_queries, volumes


def check_theorem3(cfg: BoundSuiteConfig) -> BoundCheck:
    """Empirical stopping-time mean sits inside [tau1 - 2 SE, upper + 2 SE]."""
    root = np.random.SeedSequence(cfg.seed, spawn_key=(4,))
    stops = []
    for run_seq in root.spawn(cfg.t3_runs):
        w_seq, loop_seq = run_seq.spawn(2)
        true_w = np.random.default_rng(w_seq).uniform(-cfg.t3_halfwidth, cfg.t3_halfwidth, cfg.t3_dim)
        stop, _ = run_continuous_epmv(true_w, cfg.t3_k_min, cfg.t3_epsilon,
                                      sample_count=1000, seed=loop_seq,
                                      prior_halfwidth=cfg.t3_halfwidth,
                                      max_queries=cfg.t3_max_queries)
        stops.append(stop)
    stops = np.asarray(stops, dtype=float)
    mean = float(stops.mean())
    se = float(stops.std(ddof=1) / math.sqrt(len(stops))) if len(stops) > 1 else 0.0
    tau1, upper = theorem3_bounds(cfg.t3_epsilon, cfg.t3_dim, cfg.t3_k_min, cfg.t3_c)
    low_margin = mean - (tau1 - 2.0 * se)
    high_margin = (upper + 2.0 * se) - mean if math.isfinite(upper) else math.inf
    worst = min(low_margin, high_margin)
    return BoundCheck("theorem3_stopping_time", worst >= 0.0, worst,
                      {"mean": mean, "se": se, "tau1": tau1, "upper": upper,
                       "stops": stops.tolist()})


def run_bound_suite(cfg: BoundSuiteConfig, out_dir=None) -> list:
    """Execute the configured bound checks; write a pass/fail report."""
    checks = []
    if "lemma1" in cfg.checks:
        checks.append(check_lemma1(cfg))
    if "prop1" in cfg.checks:
        checks.append(check_prop1(cfg))
    if "prop2" in cfg.checks:
        checks.append(check_prop2(cfg))
    if "theorem2" in cfg.checks:
        exp_cfg = cfg.experiment or ExperimentConfig(experiment_id="bounds-t2", seed=cfg.seed)
        checks.append(check_theorem2(run_experiment(exp_cfg)))
    if "theorem3" in cfg.checks:
        checks.append(check_theorem3(cfg))
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "bounds_report.txt", "w") as fh:
            for c in checks:
                fh.write(f"{'PASS' if c.passed else 'FAIL'} {c.name} margin={c.margin:.6g}\n")
        with open(out / "bounds_report.yaml", "w") as fh:
            yaml.safe_dump([{"name": c.name, "passed": bool(c.passed),
                             "margin": float(c.margin)} for c in checks], fh)
    return checks
