"""Estimation-quality metrics: squared error and ranking agreement."""

from __future__ import annotations

import numpy as np

from .embedding import Embedding


def mse(w_true, w_est) -> float:
    """Squared Euclidean distance between the true and estimated points."""
    w_true = np.asarray(w_true, dtype=float)
    w_est = np.asarray(w_est, dtype=float)
    if w_true.shape != w_est.shape:
        raise ValueError(f"shape mismatch {w_true.shape} vs {w_est.shape}")
    diff = w_true - w_est
    return float(diff @ diff)


def _merge_count(seq: list) -> tuple[list, int]:
    n = len(seq)
    if n <= 1:
        return seq, 0
    mid = n // 2
    left, inv_l = _merge_count(seq[:mid])
    right, inv_r = _merge_count(seq[mid:])
    merged = []
    inv = inv_l + inv_r
    i = j = 0
    while i < len(left) and j < len(right):
        if left[i] <= right[j]:
            merged.append(left[i])
            i += 1
        else:
            merged.append(right[j])
            inv += len(left) - i
            j += 1
    merged.extend(left[i:])
    merged.extend(right[j:])
    return merged, inv


def kendall_tau_normalized(rank_a, rank_b) -> float:
    """Discordant-pair fraction between two orderings of the same items.

    Both arguments list item ids from best to worst.  Returns the number of
    item pairs ordered differently, divided by n(n-1)/2, so 0 means equal
    orderings and 1 means exact reversal.  Inversions are counted with a
    merge sort rather than the quadratic double loop.
    """
    a = list(rank_a)
    b = list(rank_b)
    n = len(a)
    if len(b) != n:
        raise ValueError("rankings must have equal length")
    if len(set(a)) != n or set(a) != set(b):
        raise ValueError("rankings must be permutations of the same items")
    if n < 2:
        return 0.0
    pos_b = {item: i for i, item in enumerate(b)}
    seq = [pos_b[item] for item in a]
    _, inversions = _merge_count(seq)
    return inversions / (n * (n - 1) / 2)


def ranking_metric(w_true, w_est, e: Embedding, batch_size: int = 15,
                   batches: int = 1000, rng: np.random.Generator | None = None) -> float:
    """Mean normalized Kendall tau over random item batches.

    Each batch ranks `batch_size` sampled items by distance to the true
    point and to the estimate; the metric averages the disagreement.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    if batch_size < 2 or batch_size > e.n_items:
        raise ValueError("batch_size must lie in [2, n_items]")
    if batches < 1:
        raise ValueError("need at least one batch")
    w_true = np.asarray(w_true, dtype=float)
    w_est = np.asarray(w_est, dtype=float)
    taus = np.empty(batches)
    for t in range(batches):
        idx = rng.choice(e.n_items, size=batch_size, replace=False)
        pts = e.items[idx]
        d_true = np.sum((pts - w_true) ** 2, axis=1)
        d_est = np.sum((pts - w_est) ** 2, axis=1)
        order_true = idx[np.argsort(d_true, kind="stable")]
        order_est = idx[np.argsort(d_est, kind="stable")]
        taus[t] = kendall_tau_normalized(order_true.tolist(), order_est.tolist())
    return float(taus.mean())
