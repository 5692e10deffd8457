"""Information-theoretic bound evaluators for the paired-comparison model.

These are closed-form expressions: an entropy sandwich for log-concave
posteriors, an MSE floor implied by the per-query one-bit budget, per-query
information guarantees for equiprobable and mean-cut hyperplane queries, and
a two-sided bound on the expected number of queries to reach a target
posterior volume.
"""

from __future__ import annotations

import math

import numpy as np

from .response_model import logistic

LOG2E = math.log2(math.e)


def binary_entropy(p):
    """h_b(p) in bits, elementwise, exact 0 at p in {0, 1}."""
    arr = np.atleast_1d(np.asarray(p, dtype=float))
    if np.any((arr < 0) | (arr > 1)):
        raise ValueError("binary entropy needs p in [0, 1]")
    out = np.zeros_like(arr)
    interior = (arr > 0) & (arr < 1)
    pi = arr[interior]
    out[interior] = -pi * np.log2(pi) - (1 - pi) * np.log2(1 - pi)
    return float(out[0]) if np.ndim(p) == 0 else out


def mse_lower_bound(d: int, i: int) -> float:
    """Floor on E|W - West|^2 after i unit-information queries: d 2^(-2i/d) / (2 pi e)."""
    if d < 1 or i < 0:
        raise ValueError("need d >= 1 and i >= 0")
    return d * 2.0 ** (-2.0 * i / d) / (2.0 * math.pi * math.e)


def lemma1_constant(d: int) -> float:
    """c_d = e^2 d^2 / (4 sqrt(2) (d + 2))."""
    if d < 1:
        raise ValueError("need d >= 1")
    return math.e ** 2 * d * d / (4.0 * math.sqrt(2.0) * (d + 2))


def lemma1_bounds(cov: np.ndarray) -> tuple[float, float]:
    """Differential-entropy sandwich (bits) for a log-concave density.

    lower = (d/2) log2(2 |Sigma|^(1/d) / (e^2 c_d))
    upper = (d/2) log2(2 pi e |Sigma|^(1/d))   (equality iff Gaussian)
    """
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise ValueError("covariance must be square")
    d = cov.shape[0]
    sign, logdet = np.linalg.slogdet(cov)
    if sign <= 0:
        raise ValueError("covariance must be positive definite")
    vol = math.exp(logdet / d)  # |Sigma|^(1/d)
    lower = (d / 2.0) * math.log2(2.0 * vol / (math.e ** 2 * lemma1_constant(d)))
    upper = (d / 2.0) * math.log2(2.0 * math.pi * math.e * vol)
    return lower, upper


def prop1_lower(c: float, k: float, sigma: float) -> float:
    """Per-query information floor for equiprobable queries.

    L_{c,k}(sigma) = (1 - h_b(f(c k sigma / 2))) (1 - c), bits.
    """
    if not 0 <= c <= 1:
        raise ValueError("c must lie in [0, 1]")
    if k < 0 or sigma < 0:
        raise ValueError("k and sigma must be nonnegative")
    return float((1.0 - binary_entropy(logistic(c * k * sigma / 2.0))) * (1.0 - c))


def prop2_bounds(k: float, sigma: float) -> tuple[float, float]:
    """Mean-cut query guarantees: probability deviation cap and info floor.

    deviation: |p1 - 1/2| <= (e - 2) / (2 e) + ln 2 / (k sigma)
    info:      I >= h_b(1/e - ln 2 / (k sigma)) - pi^2 log2(e) / (3 k sigma)
    The h_b argument is clamped to [0, 1/2] and the floor to [0, 1].
    """
    if k <= 0 or sigma <= 0:
        raise ValueError("k and sigma must be positive")
    ks = k * sigma
    deviation = (math.e - 2.0) / (2.0 * math.e) + math.log(2.0) / ks
    arg = min(max(1.0 / math.e - math.log(2.0) / ks, 0.0), 0.5)
    info = binary_entropy(arg) - math.pi ** 2 * LOG2E / (3.0 * ks)
    return deviation, float(min(max(info, 0.0), 1.0))


def adaptive_simpson(f, a: float, b: float, rtol: float = 1e-8, max_depth: int = 50) -> float:
    """Adaptive Simpson quadrature with relative tolerance control."""
    def simpson(x0, x2, f0, f1, f2):
        return (x2 - x0) / 6.0 * (f0 + 4.0 * f1 + f2)

    def recurse(x0, x2, f0, f1, f2, whole, tol, depth):
        xm = 0.5 * (x0 + x2)
        xl = 0.5 * (x0 + xm)
        xr = 0.5 * (xm + x2)
        fl, fr = f(xl), f(xr)
        left = simpson(x0, xm, f0, fl, f1)
        right = simpson(xm, x2, f1, fr, f2)
        if depth >= max_depth or abs(left + right - whole) <= 15.0 * tol:
            return left + right + (left + right - whole) / 15.0
        return (recurse(x0, xm, f0, fl, f1, left, tol / 2.0, depth + 1)
                + recurse(xm, x2, f1, fr, f2, right, tol / 2.0, depth + 1))

    if b <= a:
        return 0.0
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = simpson(a, b, fa, fm, fb)
    tol = rtol * max(abs(whole), 1e-300)
    return recurse(a, b, fa, fm, fb, whole, tol, 0)


def theorem3_bounds(epsilon: float, d: int, k_min: float, c: float) -> tuple[float, float]:
    """Two-sided bound on the expected query count to posterior volume epsilon.

    Stopping rule: T_eps = min{i : |Sigma_i|^(1/d) < epsilon}.  Returns
    (tau1, upper) with tau1 = (d/2) log2(1 / (2 pi e epsilon)) a floor on
    E[T_eps], and upper the drift bound driven by the per-query floor
    l(x) = L_{c,k_min}(2^(-x/d) / sqrt(2 pi e)); when l(tau2) is zero the
    drift argument degenerates and the upper bound is +inf.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if d < 1:
        raise ValueError("d must be >= 1")
    tau1 = (d / 2.0) * math.log2(1.0 / (2.0 * math.pi * math.e * epsilon))
    tau2 = (d / 2.0) * math.log2(math.e ** 2 * lemma1_constant(d) / (2.0 * epsilon))

    def l(x):
        return prop1_lower(c, k_min, 2.0 ** (-x / d) / math.sqrt(2.0 * math.pi * math.e))

    l_tau2 = l(tau2)
    if l_tau2 <= 0.0:
        return tau1, math.inf
    integral = adaptive_simpson(l, 0.0, tau2, rtol=1e-8)
    upper = tau2 + (tau2 + 1.0) / l_tau2 - integral / l_tau2
    return tau1, upper
