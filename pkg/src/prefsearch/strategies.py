"""Query selection: information gain, its variance surrogates, and the loop.

Each strategy scores candidate pairs against the current posterior batch:

  infogain  eta0 = h_b(p1) - mean_s h_b(f_s), the exact one-query mutual
            information estimated over posterior samples
  epmv      eta1 = k sqrt(a' Sigma a) - lam |p1 - 1/2|
  mcmv      eta2 = k sqrt(a' Sigma a) - lam |a' mu - b| / |a|
  random    uniform choice

with f_s the probability of response 1 at sample s and p1 their mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import binary_entropy
from .embedding import Embedding
from .posterior import (PosteriorBatch, ResponseHistory, sample_posterior)
from .response_model import NoiseSchemeConfig, PairQuery, logistic

STRATEGY_KINDS = ("infogain", "epmv", "mcmv", "random")
FULL_POOL_LIMIT = 2000       # enumerate all pairs up to this many items
CHUNK_ENTRIES = 4_000_000    # cap on margin-matrix entries per utility chunk


class SelectionError(RuntimeError):
    """Query selection could not produce a pair (empty pool, no bracket)."""


@dataclass(frozen=True)
class StrategyConfig:
    kind: str
    lam: float = 1.0
    beta: float = 1.0
    sample_count: int = 1000

    def __post_init__(self):
        if self.kind not in STRATEGY_KINDS:
            raise ValueError(f"unknown strategy {self.kind!r}; expected one of {STRATEGY_KINDS}")
        if not (0 < self.beta <= 1):
            raise ValueError("beta must lie in (0, 1]")
        if self.lam < 0:
            raise ValueError("lam must be nonnegative")
        if self.sample_count < 10:
            raise ValueError("sample_count must be >= 10")


class QueryPool:
    """Candidate pairs of embedding items with stacked hyperplane geometry.

    Pools over at most FULL_POOL_LIMIT items materialize every (i < j) pair
    up front in lexicographic order; larger pools stay lazy and sample index
    pairs uniformly without replacement each step to bound memory.
    """

    def __init__(self, embedding: Embedding, scheme: NoiseSchemeConfig,
                 pair_indices: np.ndarray | None = None):
        self.embedding = embedding
        self.scheme = scheme
        n = embedding.n_items
        self.total_pairs = n * (n - 1) // 2
        if pair_indices is not None:
            self._materialize(np.asarray(pair_indices))
        elif n <= FULL_POOL_LIMIT:
            ii, jj = np.triu_indices(n, k=1)
            self._materialize(np.column_stack([ii, jj]))
        else:
            self.ii = None  # lazy

    def _materialize(self, idx: np.ndarray) -> None:
        items = self.embedding.items
        self.ii = idx[:, 0]
        self.jj = idx[:, 1]
        p = items[self.ii]
        q = items[self.jj]
        self.A = 2.0 * (p - q)
        self.b = np.sum(p * p, axis=1) - np.sum(q * q, axis=1)
        norms = np.linalg.norm(self.A, axis=1)
        if np.any(norms <= 0):
            raise SelectionError("pool contains a degenerate pair (identical items)")
        self.k = np.asarray(self.scheme.noise_constant(norms), dtype=float)

    @property
    def is_lazy(self) -> bool:
        return self.ii is None

    def __len__(self) -> int:
        return self.total_pairs if self.is_lazy else self.ii.shape[0]

    def pair(self, m: int) -> PairQuery:
        i = int(self.ii[m])
        j = int(self.jj[m])
        return PairQuery(p=self.embedding.items[i], q=self.embedding.items[j],
                         a=self.A[m], b=float(self.b[m]), k=float(self.k[m]),
                         p_index=i, q_index=j)

    def subset(self, mask_or_indices) -> "QueryPool":
        idx = np.column_stack([self.ii[mask_or_indices], self.jj[mask_or_indices]])
        return QueryPool(self.embedding, self.scheme, pair_indices=idx)

    def sample_pairs(self, rng: np.random.Generator, count: int) -> "QueryPool":
        """Uniform sample of `count` distinct pairs from the full pool (lazy mode)."""
        n = self.embedding.n_items
        total = self.total_pairs
        count = min(count, total)
        chosen = np.array([], dtype=np.int64)
        while chosen.size < count:
            need = count - chosen.size
            draw = rng.integers(0, total, size=int(1.2 * need) + 8)
            chosen = np.unique(np.concatenate([chosen, draw]))
        chosen = np.sort(chosen)[:count]
        # decode upper-triangle linear indices into (i, j)
        row_starts = np.cumsum(np.concatenate([[0], np.arange(n - 1, 0, -1)]))
        ii = np.searchsorted(row_starts, chosen, side="right") - 1
        jj = chosen - row_starts[ii] + ii + 1
        return QueryPool(self.embedding, self.scheme, pair_indices=np.column_stack([ii, jj]))


@dataclass
class SelectionState:
    """Inputs to one selection step; the batch must reflect the history."""

    batch: PosteriorBatch
    history: ResponseHistory
    pool: QueryPool
    batch_entries: int | None = None

    def __post_init__(self):
        if self.batch_entries is not None and self.batch_entries != len(self.history):
            raise ValueError("posterior batch is stale relative to the history")


def _chunks(m: int, s: int):
    step = max(1, CHUNK_ENTRIES // max(s, 1))
    for start in range(0, m, step):
        yield start, min(m, start + step)


def _pool_prob1(A, b, k, samples):
    """Mean probability of response 1 per pool row, plus per-sample values."""
    margins = samples @ A.T - b
    return logistic(-k * margins)


def pool_infogain(A, b, k, samples) -> np.ndarray:
    m = A.shape[0]
    out = np.empty(m)
    for lo, hi in _chunks(m, samples.shape[0]):
        f = _pool_prob1(A[lo:hi], b[lo:hi], k[lo:hi], samples)
        p1 = f.mean(axis=0)
        out[lo:hi] = binary_entropy(p1) - binary_entropy(f).mean(axis=0)
    return out


def pool_epmv(A, b, k, samples, cov, lam) -> np.ndarray:
    m = A.shape[0]
    proj_sd = np.sqrt(np.maximum(np.einsum("md,de,me->m", A, cov, A), 0.0))
    out = np.empty(m)
    for lo, hi in _chunks(m, samples.shape[0]):
        p1 = _pool_prob1(A[lo:hi], b[lo:hi], k[lo:hi], samples).mean(axis=0)
        out[lo:hi] = k[lo:hi] * proj_sd[lo:hi] - lam * np.abs(p1 - 0.5)
    return out


def pool_mcmv(A, b, k, mean, cov, lam) -> np.ndarray:
    proj_sd = np.sqrt(np.maximum(np.einsum("md,de,me->m", A, cov, A), 0.0))
    dist = np.abs(A @ mean - b) / np.linalg.norm(A, axis=1)
    return k * proj_sd - lam * dist


def info_gain_utility(pair: PairQuery, batch: PosteriorBatch) -> float:
    """Sample-estimated mutual information of asking this pair, in bits."""
    return float(pool_infogain(pair.a[None, :], np.array([pair.b]),
                               np.array([pair.k]), batch.samples)[0])


def epmv_utility(pair: PairQuery, batch: PosteriorBatch, lam: float = 1.0) -> float:
    """Posterior-variance surrogate with an equiprobability penalty."""
    return float(pool_epmv(pair.a[None, :], np.array([pair.b]), np.array([pair.k]),
                           batch.samples, batch.covariance, lam)[0])


def mcmv_utility(pair: PairQuery, mean: np.ndarray, cov: np.ndarray, lam: float = 1.0) -> float:
    """Variance term minus lam times the mean-to-hyperplane distance."""
    return float(pool_mcmv(pair.a[None, :], np.array([pair.b]), np.array([pair.k]),
                           np.asarray(mean, dtype=float), np.asarray(cov, dtype=float), lam)[0])


def select_query(cfg: StrategyConfig, state: SelectionState, rng: np.random.Generator) -> PairQuery:
    """Downsample the pool at rate beta, then return the utility argmax.

    Ties break toward the lowest (p_index, q_index); the random strategy
    picks uniformly from the surviving pairs.
    """
    pool = state.pool
    if len(pool) == 0:
        raise SelectionError("candidate pool is empty")
    if pool.is_lazy:
        count = max(1, math.ceil(cfg.beta * pool.total_pairs))
        sub = pool.sample_pairs(rng, min(count, 200_000))
    elif cfg.beta >= 1.0:
        sub = pool
    else:
        mask = rng.random(len(pool)) < cfg.beta
        while not mask.any():  # Bernoulli thinning must leave a survivor
            mask = rng.random(len(pool)) < cfg.beta
        sub = pool.subset(mask)

    if cfg.kind == "random":
        return sub.pair(int(rng.integers(len(sub))))
    if cfg.kind == "infogain":
        utilities = pool_infogain(sub.A, sub.b, sub.k, state.batch.samples)
    elif cfg.kind == "epmv":
        utilities = pool_epmv(sub.A, sub.b, sub.k, state.batch.samples,
                              state.batch.covariance, cfg.lam)
    else:
        utilities = pool_mcmv(sub.A, sub.b, sub.k, state.batch.mean,
                              state.batch.covariance, cfg.lam)
    # pools are ordered by (p_index, q_index); first argmax = lowest pair
    return sub.pair(int(np.argmax(utilities)))


def top_eigenvector(cov: np.ndarray) -> np.ndarray:
    """Unit eigenvector of the largest eigenvalue, sign-fixed so the first
    component exceeding 1e-12 in magnitude is positive."""
    _, vecs = np.linalg.eigh(np.asarray(cov, dtype=float))
    v = vecs[:, -1]
    for comp in v:
        if abs(comp) > 1e-12:
            if comp < 0:
                v = -v
            break
    return v / np.linalg.norm(v)


def continuous_epmv_query(batch: PosteriorBatch, k: float) -> tuple[np.ndarray, float]:
    """Unconstrained EPMV query: top-variance direction, equiprobable offset.

    Bisects the offset b until the sampled probability of response 1 is
    within 1/(2 sqrt(S)) of one half; the estimate is monotone in b, so a
    bracket over the sample projections always exists unless the batch is
    degenerate along the chosen direction.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    a = top_eigenvector(batch.covariance)
    margins = batch.samples @ a
    s = batch.size
    tol = 1.0 / (2.0 * math.sqrt(s))
    if k == 0.0:
        return a, float(margins.mean())  # every offset is equiprobable at k = 0

    def p1(b):
        return float(np.mean(logistic(k * (b - margins))))

    lo = float(margins.min()) - 1.0
    hi = float(margins.max()) + 1.0
    if not (p1(lo) < 0.5 < p1(hi)):
        raise SelectionError("cannot bracket the equiprobable offset; "
                             "batch is degenerate along the query direction")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        val = p1(mid)
        if abs(val - 0.5) <= tol:
            return a, mid
        if val < 0.5:
            lo = mid
        else:
            hi = mid
    raise SelectionError("equiprobable offset bisection did not converge")


class SearchSession:
    """One search loop: propose a pair, absorb the response, re-estimate.

    Owns the seeded RNG streams so that identical seeds and response
    sequences reproduce identical proposals and estimates, whether the
    responses come from a simulated oracle or a live user.
    """

    def __init__(self, pool: QueryPool, strategy: StrategyConfig, seed,
                 prior_halfwidth: float = 1.0):
        self.pool = pool
        self.strategy = strategy
        seed_seq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(int(seed))
        select_seq, sampler_root = seed_seq.spawn(2)
        self._rng_select = np.random.default_rng(select_seq)
        self._sampler_root = sampler_root
        self.history = ResponseHistory(dim=pool.embedding.dim, prior_halfwidth=prior_halfwidth)
        self.batch = self._resample()
        self.pending: PairQuery | None = None
        self.steps = 0

    def _resample(self) -> PosteriorBatch:
        return sample_posterior(self.history, size=self.strategy.sample_count,
                                seed=self._sampler_root.spawn(1)[0])

    @property
    def estimate(self) -> np.ndarray:
        return self.batch.mean

    def propose(self) -> PairQuery:
        """Return the pending pair, selecting a new one if none is pending."""
        if self.pending is None:
            state = SelectionState(batch=self.batch, history=self.history,
                                   pool=self.pool, batch_entries=len(self.history))
            self.pending = select_query(self.strategy, state, self._rng_select)
        return self.pending

    def absorb(self, response: int) -> None:
        """Record the response to the pending pair and resample the posterior."""
        if self.pending is None:
            raise SelectionError("no pending query to answer")
        self.history.append(self.pending, response)
        self.pending = None
        self.batch = self._resample()
        self.steps += 1


def run_step(session: SearchSession, responder) -> SearchSession:
    """One loop iteration: select, query the responder, update the posterior."""
    pair = session.propose()
    session.absorb(responder(pair))
    return session
