"""Pair geometry, noise schemes, and the logistic observation model.

A paired comparison between items ``p`` and ``q`` asks which is closer to the
hidden user point ``w``.  The squared-distance difference collapses to an
affine form: ``|w - q|^2 - |w - p|^2 = a @ w - b`` with ``a = 2 (p - q)`` and
``b = |p|^2 - |q|^2``, so each query is a soft hyperplane probe.  Response 0
means ``p`` was preferred; response 1 means ``q``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SCHEMES = ("constant", "normalized", "decaying")
NOISE_FAMILIES = ("logistic", "gaussian")


class DegeneratePairError(ValueError):
    """Raised when the two items of a pair coincide."""


def logistic(x):
    """Numerically stable sigmoid 1 / (1 + exp(-x)), elementwise."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def log_logistic(x):
    """log(sigmoid(x)) via a log-sum-exp form, safe for large |x|."""
    return -np.logaddexp(0.0, -np.asarray(x, dtype=float))


@dataclass(frozen=True)
class NoiseSchemeConfig:
    """Noise constant schedule: how k_pq depends on the pair geometry.

    constant:    k = k0
    normalized:  k = k0 / |a|
    decaying:    k = k0 * exp(-|a|)
    """

    scheme: str = "constant"
    k0: float = 1.0

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown noise scheme {self.scheme!r}; expected one of {SCHEMES}")
        if not math.isfinite(self.k0) or self.k0 < 0:
            raise ValueError(f"k0 must be finite and nonnegative, got {self.k0}")

    def noise_constant(self, a_norm):
        """k for a pair with hyperplane normal length |a| (vectorized)."""
        if self.scheme == "constant":
            return np.broadcast_to(np.float64(self.k0), np.shape(a_norm)).copy() if np.ndim(a_norm) else float(self.k0)
        a_norm = np.asarray(a_norm, dtype=float)
        if np.any(a_norm <= 0):
            raise DegeneratePairError("noise constant undefined for zero-length normal")
        if self.scheme == "normalized":
            out = self.k0 / a_norm
        else:
            out = self.k0 * np.exp(-a_norm)
        return float(out) if np.ndim(a_norm) == 0 else out


@dataclass(frozen=True, eq=False)
class PairQuery:
    """One comparison query: items plus the derived hyperplane (a, b, k)."""

    p: np.ndarray
    q: np.ndarray
    a: np.ndarray
    b: float
    k: float
    p_index: int | None = None
    q_index: int | None = None

    @property
    def dim(self) -> int:
        return self.a.shape[0]

    def margin(self, w) -> float:
        """Signed affine margin a @ w - b; positive favors p."""
        return float(self.a @ np.asarray(w, dtype=float) - self.b)


def make_pair(p, q, cfg: NoiseSchemeConfig, p_index=None, q_index=None) -> PairQuery:
    """Build the hyperplane query for items p, q under a noise scheme."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape or p.ndim != 1:
        raise ValueError("p and q must be 1-d vectors of equal dimension")
    if not (np.all(np.isfinite(p)) and np.all(np.isfinite(q))):
        raise ValueError("item coordinates must be finite")
    diff = p - q
    if float(np.max(np.abs(diff))) <= 1e-12:
        raise DegeneratePairError("items coincide (|p - q|_inf <= 1e-12)")
    a = 2.0 * diff
    b = float(p @ p - q @ q)
    k = cfg.noise_constant(float(np.linalg.norm(a)))
    return PairQuery(p=p, q=q, a=a, b=b, k=k, p_index=p_index, q_index=q_index)


def hyperplane_pair(a, b, k) -> PairQuery:
    """Synthesize a PairQuery realizing an arbitrary hyperplane (a, b).

    Continuous strategies optimize (a, b) directly; this picks the canonical
    item pair p = m + a/4, q = m - a/4 with m the foot point (b/|a|^2) a,
    which reproduces a = 2(p - q) and b = |p|^2 - |q|^2 exactly.
    """
    a = np.asarray(a, dtype=float)
    nrm2 = float(a @ a)
    if nrm2 <= 0 or not np.isfinite(nrm2):
        raise DegeneratePairError("hyperplane normal must be nonzero and finite")
    m = (float(b) / nrm2) * a
    return PairQuery(p=m + a / 4.0, q=m - a / 4.0, a=a, b=float(b), k=float(k))


def response_probability(w, pair: PairQuery) -> float:
    """P(response = 0 | w), the probability that p is preferred."""
    return float(logistic(pair.k * pair.margin(w)))


@dataclass(frozen=True)
class OracleConfig:
    """Simulated responder: noise family, scheme, hidden point, seed."""

    noise_family: str
    scheme: NoiseSchemeConfig
    true_w: np.ndarray
    seed: int = 0

    def __post_init__(self):
        if self.noise_family not in NOISE_FAMILIES:
            raise ValueError(f"unknown noise family {self.noise_family!r}")
        object.__setattr__(self, "true_w", np.asarray(self.true_w, dtype=float))

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


def simulate_response(pair: PairQuery, oracle: OracleConfig, rng: np.random.Generator) -> int:
    """Draw one response bit from the oracle for this pair.

    logistic: matched model, response 0 with probability f(k (a @ w - b)).
    gaussian: mismatched model, y = 1 iff k (a @ w - b) + Z < 0, Z ~ N(0, 1).
    """
    m = pair.margin(oracle.true_w)
    if oracle.noise_family == "logistic":
        p0 = float(logistic(pair.k * m))
        return 0 if rng.random() < p0 else 1
    z = float(rng.standard_normal())
    return 1 if pair.k * m + z < 0 else 0
