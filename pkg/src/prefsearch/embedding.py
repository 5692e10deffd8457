"""Item embeddings, preparation scaling, and triplet-based noise fitting."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .response_model import NoiseSchemeConfig, log_logistic

K_MAX = 1e4          # upper edge of the k0 search interval
K_TOL_REL = 1e-6     # golden-section interval tolerance, relative to K_MAX


class EmbeddingFormatError(ValueError):
    """Malformed coordinate table (ragged row, non-numeric cell, bad shape)."""


class DegenerateEmbeddingError(ValueError):
    """Item covariance is singular; preparation scaling is undefined."""


@dataclass
class Embedding:
    """N items in R^d plus a record of the preparation applied to them."""

    items: np.ndarray
    scale_applied: float = 1.0
    centroid_removed: np.ndarray | None = None
    labels: list[str] | None = None

    def __post_init__(self):
        self.items = np.asarray(self.items, dtype=float)
        if self.items.ndim != 2:
            raise EmbeddingFormatError("items must be a 2-d array")
        if self.centroid_removed is None:
            self.centroid_removed = np.zeros(self.items.shape[1])
        else:
            self.centroid_removed = np.asarray(self.centroid_removed, dtype=float)

    @property
    def n_items(self) -> int:
        return self.items.shape[0]

    @property
    def dim(self) -> int:
        return self.items.shape[1]


@dataclass(frozen=True)
class Triplet:
    """One answered triplet: which candidate sits closer to the reference."""

    reference: int
    candidate_a: int
    candidate_b: int
    choice: int  # 0 = candidate_a reported closer, 1 = candidate_b

    def __post_init__(self):
        if self.choice not in (0, 1):
            raise ValueError(f"choice must be 0 or 1, got {self.choice}")
        if len({self.reference, self.candidate_a, self.candidate_b}) != 3:
            raise ValueError("triplet indices must be distinct")


def _parse_table(lines, what: str) -> np.ndarray:
    rows = []
    width = None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        cells = line.split(",") if "," in line else line.split()
        try:
            row = [float(c) for c in cells]
        except ValueError:
            if not rows and width is None:
                width = len(cells)  # header row; remember width for ragged checks
                continue
            raise EmbeddingFormatError(f"{what}: non-numeric cell at row {lineno}")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise EmbeddingFormatError(f"{what}: ragged row {lineno} ({len(row)} cols, expected {width})")
        if not all(math.isfinite(v) for v in row):
            raise EmbeddingFormatError(f"{what}: non-finite value at row {lineno}")
        rows.append(row)
    if not rows:
        raise EmbeddingFormatError(f"{what}: no data rows")
    return np.asarray(rows, dtype=float)


def _as_lines(source):
    if isinstance(source, (str, Path)):
        return Path(source).read_text().splitlines()
    if isinstance(source, io.IOBase):
        return source.read().splitlines()
    return list(source)


def load_embedding(source) -> Embedding:
    """Parse a delimited coordinate table (comma or whitespace, optional header)."""
    arr = _parse_table(_as_lines(source), "embedding")
    if arr.shape[1] < 2:
        raise EmbeddingFormatError(f"embedding needs dimension >= 2, got {arr.shape[1]}")
    if arr.shape[0] < 2:
        raise EmbeddingFormatError(f"embedding needs at least 2 items, got {arr.shape[0]}")
    return Embedding(items=arr)


def load_triplets(source) -> list[Triplet]:
    """Parse triplet rows: reference, candidate_a, candidate_b, choice."""
    arr = _parse_table(_as_lines(source), "triplets")
    if arr.shape[1] != 4:
        raise EmbeddingFormatError(f"triplet rows need 4 columns, got {arr.shape[1]}")
    out = []
    for row in arr:
        if np.any(row != np.round(row)):
            raise EmbeddingFormatError("triplet rows must be integers")
        out.append(Triplet(int(row[0]), int(row[1]), int(row[2]), int(row[3])))
    return out


def item_covariance(items: np.ndarray) -> np.ndarray:
    """Population covariance (1/N) of the item cloud."""
    centered = items - items.mean(axis=0)
    return centered.T @ centered / items.shape[0]


def prepare_embedding(e: Embedding) -> Embedding:
    """Center the items and rescale so distances match the response model.

    The scale is s = sqrt(d) / (3 lam_min^(1/2)) with lam_min the smallest
    eigenvalue of the item covariance; afterwards the smallest eigenvalue is
    exactly d/9, which keeps typical pairwise margins commensurate with the
    unit prior box.  Applying the preparation twice is a no-op (s = 1).
    """
    mean = e.items.mean(axis=0)
    centered = e.items - mean
    cov = centered.T @ centered / e.n_items
    eigvals = np.linalg.eigvalsh(cov)
    lam_min = float(eigvals[0])
    if lam_min <= 1e-12 * max(1.0, float(eigvals[-1])):
        raise DegenerateEmbeddingError(
            f"item covariance is singular (smallest eigenvalue {lam_min:.3e})")
    s = math.sqrt(e.dim) / (3.0 * math.sqrt(lam_min))
    return Embedding(
        items=centered * s,
        scale_applied=e.scale_applied * s,
        centroid_removed=e.centroid_removed + mean / e.scale_applied,
        labels=e.labels,
    )


def _triplet_arrays(e: Embedding, triplets):
    idx = np.asarray([[t.reference, t.candidate_a, t.candidate_b] for t in triplets])
    if idx.min() < 0 or idx.max() >= e.n_items:
        raise ValueError("triplet index out of range for this embedding")
    w = e.items[idx[:, 0]]
    p = e.items[idx[:, 1]]
    q = e.items[idx[:, 2]]
    choices = np.asarray([t.choice for t in triplets])
    return w, p, q, choices


def triplet_error_fraction(e: Embedding, triplets) -> float:
    """Fraction of triplets whose recorded choice disagrees with raw distance.

    Exact distance ties count as errors: they carry no geometric signal.
    """
    if not triplets:
        raise ValueError("need at least one triplet")
    w, p, q, choices = _triplet_arrays(e, triplets)
    da = np.sum((w - p) ** 2, axis=1)
    db = np.sum((w - q) ** 2, axis=1)
    predicted = (da > db).astype(int)
    wrong = (predicted != choices) | (da == db)
    return float(np.mean(wrong))


def triplet_log_likelihood(e: Embedding, triplets, scheme: NoiseSchemeConfig, k0: float) -> float:
    """Log-likelihood of the recorded choices under the logistic pair model."""
    w, p, q, choices = _triplet_arrays(e, triplets)
    a = 2.0 * (p - q)
    b = np.sum(p * p, axis=1) - np.sum(q * q, axis=1)
    margins = np.sum(a * w, axis=1) - b
    gains = NoiseSchemeConfig(scheme.scheme, 1.0).noise_constant(np.linalg.norm(a, axis=1))
    signs = 1.0 - 2.0 * choices  # +1 when candidate_a chosen
    ll = float(np.sum(log_logistic(k0 * gains * signs * margins)))
    if not math.isfinite(ll):
        raise ArithmeticError(f"non-finite log-likelihood at k0={k0}")
    return ll


def fit_k0(e: Embedding, triplets, scheme: NoiseSchemeConfig) -> float:
    """Maximum-likelihood k0 over [0, K_MAX] by golden-section search.

    The per-triplet log-likelihood is concave in k0 for every scheme (the
    noise constant is linear in k0), so the sum is unimodal and golden
    section converges; boundary solutions are returned at the interval edge.
    """
    if not triplets:
        raise ValueError("need at least one triplet to fit k0")
    ll = lambda k: triplet_log_likelihood(e, triplets, scheme, k)
    lo, hi = 0.0, K_MAX
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = ll(x1), ll(x2)
    tol = K_TOL_REL * K_MAX
    while hi - lo > tol:
        # ties keep the right interval so float-flat plateaus (noiseless
        # data saturating the log-likelihood at 0) resolve to the K_MAX edge
        if f1 > f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = ll(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = ll(x2)
    return 0.5 * (lo + hi)
