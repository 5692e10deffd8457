"""Log-concave posterior over the user point and its MCMC sampler.

The posterior combines a uniform prior on a centered box with logistic
response likelihoods.  Every likelihood factor is log-concave in w, so the
posterior is log-concave and a preconditioned random-walk Metropolis chain
mixes well once its proposal covariance adapts to the posterior shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import digamma

from .response_model import PairQuery

DEFAULT_SAMPLES = 1000
ESS_FLOOR = 0.1          # required effective sample size, as a fraction of S
BURN_PER_DIM = 1000      # burn-in steps per dimension, first attempt
BASE_THIN = 4            # chain thinning, first attempt
MAX_DOUBLINGS = 4        # chain-length doublings before giving up


class ConvergenceError(RuntimeError):
    """Sampler failed its effective-sample-size floor; carries diagnostics."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class EntropyEstimateError(RuntimeError):
    """Entropy estimator preconditions violated (duplicate-heavy sample)."""


@dataclass
class ResponseHistory:
    """Append-only record of answered queries plus the prior box."""

    dim: int
    prior_halfwidth: float = 1.0
    entries: list = field(default_factory=list)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")
        if not (self.prior_halfwidth > 0 and math.isfinite(self.prior_halfwidth)):
            raise ValueError("prior half-width must be positive and finite")
        self._stacked = None

    def append(self, pair: PairQuery, response: int) -> None:
        if response not in (0, 1):
            raise ValueError(f"response must be 0 or 1, got {response}")
        if pair.dim != self.dim:
            raise ValueError(f"pair dimension {pair.dim} != history dimension {self.dim}")
        self.entries.append((pair, int(response)))
        self._stacked = None

    def __len__(self) -> int:
        return len(self.entries)

    def stacked(self):
        """(A, coef) with coef = (1 - 2y) k per entry; margins are A @ w - b."""
        if self._stacked is None or self._stacked[0].shape[0] != len(self.entries):
            if self.entries:
                A = np.stack([pq.a for pq, _ in self.entries])
                b = np.array([pq.b for pq, _ in self.entries])
                coef = np.array([(1.0 - 2.0 * y) * pq.k for pq, y in self.entries])
            else:
                A = np.zeros((0, self.dim))
                b = np.zeros(0)
                coef = np.zeros(0)
            self._stacked = (A, b, coef)
        return self._stacked


def log_posterior(w, history: ResponseHistory) -> float:
    """Unnormalized log posterior density at a single point."""
    w = np.asarray(w, dtype=float)
    if w.shape != (history.dim,):
        raise ValueError(f"point has shape {w.shape}, expected ({history.dim},)")
    return float(log_posterior_many(w[None, :], history)[0])


def log_posterior_many(points: np.ndarray, history: ResponseHistory) -> np.ndarray:
    """Vectorized unnormalized log posterior for an (n, d) batch of points."""
    points = np.asarray(points, dtype=float)
    inside = np.all(np.abs(points) <= history.prior_halfwidth, axis=1)
    out = np.where(inside, 0.0, -np.inf)
    if len(history.entries) == 0:
        return out
    A, b, coef = history.stacked()
    margins = points @ A.T - b
    # log f(coef * margin) summed over history entries
    ll = -np.logaddexp(0.0, -coef * margins).sum(axis=1)
    return np.where(inside, ll, -np.inf)


@dataclass(frozen=True, eq=False)
class PosteriorBatch:
    """S posterior draws with cached moments and a mixing diagnostic."""

    samples: np.ndarray
    mean: np.ndarray
    covariance: np.ndarray
    ess: float
    seed: int

    @classmethod
    def from_samples(cls, samples: np.ndarray, ess: float, seed: int) -> "PosteriorBatch":
        samples = np.asarray(samples, dtype=float)
        mean = samples.mean(axis=0)
        centered = samples - mean
        cov = centered.T @ centered / samples.shape[0]
        return cls(samples=samples, mean=mean, covariance=cov, ess=float(ess), seed=int(seed))

    @property
    def size(self) -> int:
        return self.samples.shape[0]

    @property
    def dim(self) -> int:
        return self.samples.shape[1]


def _autocorr_time(series: np.ndarray) -> float:
    """Integrated autocorrelation time of one centered scalar series.

    Uses FFT autocovariance with Geyer's initial-positive-sequence cutoff.
    """
    n = series.shape[0]
    if n < 4:
        return 1.0
    var = float(series @ series) / n
    if var <= 0.0:
        return 1.0
    nfft = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(series, nfft)
    acov = np.fft.irfft(f * np.conj(f), nfft)[:n].real / n
    rho = acov / acov[0]
    tau = -1.0  # running 2 * sum(Gamma_m); Gamma_0 contains rho_0 = 1
    m = 0
    while 2 * m + 1 < n:
        gamma = rho[2 * m] + rho[2 * m + 1]
        if gamma <= 0.0:
            break
        tau += 2.0 * gamma
        m += 1
    return max(1.0, tau)


def effective_sample_size(chains: np.ndarray) -> float:
    """Min-over-dimensions ESS for (n_chains, n_draws, d) chain output.

    Chains are centered by the pooled mean so disagreement between chains
    inflates the autocorrelation estimate and deflates the ESS.
    """
    c, n, d = chains.shape
    pooled_mean = chains.reshape(c * n, d).mean(axis=0)
    ess_dims = []
    for j in range(d):
        total = 0.0
        for i in range(c):
            tau = _autocorr_time(chains[i, :, j] - pooled_mean[j])
            total += n / tau
        ess_dims.append(total)
    return float(min(ess_dims))


def _run_chains(history, n_chains, burn, thin, kept, rng):
    d = history.dim
    hw = history.prior_halfwidth
    x = rng.uniform(-hw, hw, size=(n_chains, d))
    lp = log_posterior_many(x, history)

    # proposal: scaled Cholesky of the running pooled covariance
    base_cov = (hw * hw / 3.0) * np.eye(d)
    chol = np.linalg.cholesky((2.38 ** 2 / d) * base_cov)
    log_scale = 0.0
    sum_x = np.zeros(d)
    sum_xx = np.zeros((d, d))
    n_seen = 0
    accepted_window = 0
    accepted_total = 0
    adapt_every = 50
    out = np.empty((n_chains, kept, d))

    total_steps = burn + kept * thin
    for t in range(total_steps):
        step = np.exp(log_scale) * (rng.standard_normal((n_chains, d)) @ chol.T)
        prop = x + step
        lp_prop = log_posterior_many(prop, history)
        accept = np.log(rng.random(n_chains)) < (lp_prop - lp)
        x[accept] = prop[accept]
        lp[accept] = lp_prop[accept]
        n_acc = int(accept.sum())
        accepted_total += n_acc

        if t < burn:
            accepted_window += n_acc
            if t == burn // 2:
                # drop the transient from the covariance estimate
                sum_x[:] = 0.0
                sum_xx[:] = 0.0
                n_seen = 0
            sum_x += x.sum(axis=0)
            sum_xx += x.T @ x
            n_seen += n_chains
            if (t + 1) % adapt_every == 0:
                rate = accepted_window / (adapt_every * n_chains)
                accepted_window = 0
                log_scale += 0.7 * (rate - 0.3)
                if n_seen >= 20 * d:
                    mean = sum_x / n_seen
                    cov = sum_xx / n_seen - np.outer(mean, mean)
                    ridge = 1e-10 * max(float(np.trace(cov)) / d, 1e-10)
                    chol = np.linalg.cholesky((2.38 ** 2 / d) * (cov + ridge * np.eye(d)))
        else:
            j = t - burn
            if j % thin == thin - 1:
                out[:, j // thin, :] = x

    acc_rate = accepted_total / (total_steps * n_chains)
    return out, acc_rate


def sample_posterior(history: ResponseHistory, size: int = DEFAULT_SAMPLES, seed=0,
                     *, n_chains: int | None = None) -> PosteriorBatch:
    """Draw `size` posterior samples with an adaptive random-walk chain.

    Runs several independent chains (merged in seed order), burns in for
    1000 d steps, thins, and checks an ESS floor of 0.1 size; on failure
    the chain length doubles, up to a cap, before raising ConvergenceError.
    Identical (history, size, seed) inputs reproduce the batch bit for bit.
    """
    if size < 10:
        raise ValueError("size must be >= 10")
    d = history.dim
    if isinstance(seed, np.random.SeedSequence):
        seed_seq = seed
        seed_label = int(seed_seq.generate_state(1)[0])
    else:
        seed_seq = np.random.SeedSequence(int(seed))
        seed_label = int(seed)
    if n_chains is None:
        n_chains = max(2, min(16, size // 50))
    kept = -(-size // n_chains)  # ceil

    attempts = seed_seq.spawn(MAX_DOUBLINGS + 1)
    diagnostics = []
    for attempt in range(MAX_DOUBLINGS + 1):
        factor = 2 ** attempt
        burn = BURN_PER_DIM * d * factor
        thin = BASE_THIN * factor
        rng = np.random.default_rng(attempts[attempt])
        chains, acc_rate = _run_chains(history, n_chains, burn, thin, kept, rng)
        ess = effective_sample_size(chains)
        diagnostics.append({"attempt": attempt, "burn": burn, "thin": thin,
                            "ess": ess, "acceptance_rate": acc_rate})
        if ess >= ESS_FLOOR * size:
            samples = chains.reshape(n_chains * kept, d)[:size]
            return PosteriorBatch.from_samples(samples, ess=ess, seed=seed_label)
    raise ConvergenceError(
        f"ESS floor {ESS_FLOOR * size:.0f} not reached after {MAX_DOUBLINGS} doublings",
        diagnostics={"attempts": diagnostics, "history_len": len(history)})


def posterior_entropy_estimate(batch: PosteriorBatch, k: int = 4) -> float:
    """Kozachenko-Leonenko nearest-neighbor entropy of the batch, in bits.

    Used only for bound verification.  Requires at least 500 samples; more
    than 1% duplicated points invalidates the nearest-neighbor distances.
    """
    s, d = batch.samples.shape
    if s < 500:
        raise ValueError(f"entropy estimate needs >= 500 samples, got {s}")
    if k < 1 or k >= s:
        raise ValueError("neighbor order k out of range")
    tree = cKDTree(batch.samples)
    dist, _ = tree.query(batch.samples, k=k + 1, workers=1)
    eps = dist[:, k]
    zero = eps <= 0.0
    if zero.mean() > 0.01:
        raise EntropyEstimateError(
            f"{int(zero.sum())} duplicate samples out of {s} exceed the 1% budget")
    eps = eps[~zero]
    log_vd = (d / 2.0) * math.log(math.pi) - math.lgamma(d / 2.0 + 1.0)
    h_nats = (digamma(s) - digamma(k) + log_vd + d * float(np.mean(np.log(eps))))
    return h_nats / math.log(2.0)


def dump_samples(batch: PosteriorBatch, path) -> None:
    """Write one sample per line as comma-delimited text."""
    with open(path, "w") as fh:
        for row in batch.samples:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
