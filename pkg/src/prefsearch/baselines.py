"""Comparison baselines: cutting-plane ranking and shrinking-cloud search.

The cutting-plane baseline keeps a feasible polytope of user points, asks
pairs whose hyperplane still intersects it, and estimates with the Chebyshev
center.  The LP machinery is a dense two-phase tableau simplex with Bland's
rule; the problems here have a handful of variables, so termination and
determinism matter more than speed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .response_model import PairQuery

LP_TOL = 1e-9


class InfeasibleError(RuntimeError):
    """LP has no feasible point."""


class UnboundedError(RuntimeError):
    """LP objective is unbounded above."""


class EmptyPolytopeError(RuntimeError):
    """Feasible polytope has shrunk to nothing; the caller must reset."""


def _pivot(T, basis, row, col):
    T[row] /= T[row, col]
    for i in range(T.shape[0]):
        if i != row and T[i, col] != 0.0:
            T[i] -= T[i, col] * T[row]
    basis[row] = col


def _run_simplex(T, basis, cost, allowed_cols, max_iter=20000):
    """Maximize cost over the tableau with Bland's anti-cycling rule."""
    m = T.shape[0]
    for _ in range(max_iter):
        cb = cost[basis]
        reduced = cost[allowed_cols] - cb @ T[:, allowed_cols]
        improving = np.nonzero(reduced > LP_TOL)[0]
        if improving.size == 0:
            return
        col = int(allowed_cols[improving[0]])  # lowest eligible index enters
        pos = T[:, col] > LP_TOL
        if not pos.any():
            raise UnboundedError("no leaving row; objective unbounded")
        ratios = np.full(m, np.inf)
        ratios[pos] = T[pos, -1] / T[pos, col]
        best = ratios.min()
        candidates = np.nonzero(ratios <= best + LP_TOL)[0]
        row = int(candidates[np.argmin([basis[r] for r in candidates])])
        _pivot(T, basis, row, col)
    raise RuntimeError("simplex iteration cap exceeded")


def simplex_maximize(c, A, b):
    """max c @ x  s.t.  A x <= b, x >= 0, by the two-phase dense simplex.

    Returns (x, value).  Raises InfeasibleError / UnboundedError.
    """
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    c = np.asarray(c, dtype=float)
    m, n = A.shape
    flip = b < 0
    A[flip] *= -1.0
    b[flip] *= -1.0
    art_rows = np.nonzero(flip)[0]
    n_art = art_rows.size

    n_cols = n + m + n_art
    T = np.zeros((m, n_cols + 1))
    T[:, :n] = A
    slack = np.eye(m)
    slack[art_rows, art_rows] = -1.0
    T[:, n:n + m] = slack
    for t, i in enumerate(art_rows):
        T[i, n + m + t] = 1.0
    T[:, -1] = b

    basis = np.array([n + m + list(art_rows).index(i) if flip[i] else n + i
                      for i in range(m)], dtype=int)

    if n_art:
        phase1 = np.zeros(n_cols)
        phase1[n + m:] = -1.0
        _run_simplex(T, basis, phase1, np.arange(n_cols))
        if float(phase1[basis] @ T[:, -1]) < -LP_TOL:
            raise InfeasibleError("phase 1 optimum below zero")
        for i in range(m):
            if basis[i] >= n + m:  # drive surviving artificials out
                pivots = np.nonzero(np.abs(T[i, :n + m]) > LP_TOL)[0]
                if pivots.size:
                    _pivot(T, basis, i, int(pivots[0]))

    phase2 = np.zeros(n_cols)
    phase2[:n] = c
    _run_simplex(T, basis, phase2, np.arange(n + m))
    x = np.zeros(n)
    for i, col in enumerate(basis):
        if col < n:
            x[col] = T[i, -1]
    return x, float(c @ x)


@dataclass(frozen=True)
class Polytope:
    """Intersection of halfspaces normal @ w <= offset, box included."""

    normals: np.ndarray
    offsets: np.ndarray
    box_halfwidth: float

    @classmethod
    def box(cls, dim: int, halfwidth: float = 1.0) -> "Polytope":
        eye = np.eye(dim)
        normals = np.vstack([eye, -eye])
        offsets = np.full(2 * dim, float(halfwidth))
        return cls(normals=normals, offsets=offsets, box_halfwidth=float(halfwidth))

    @property
    def dim(self) -> int:
        return self.normals.shape[1]

    def with_cut(self, normal, offset) -> "Polytope":
        normal = np.asarray(normal, dtype=float)
        if normal.shape != (self.dim,):
            raise ValueError(f"cut normal has shape {normal.shape}, expected ({self.dim},)")
        return Polytope(normals=np.vstack([self.normals, normal]),
                        offsets=np.append(self.offsets, float(offset)),
                        box_halfwidth=self.box_halfwidth)

    def _shifted_rhs(self) -> np.ndarray:
        # substitute u = w + r 1 >= 0 so the LP runs in standard form
        return self.offsets + self.box_halfwidth * self.normals.sum(axis=1)


def chebyshev_center(poly: Polytope) -> tuple[np.ndarray, float]:
    """Center and radius of the largest ball inside the polytope.

    Solves max r s.t. normal_i @ c + r |normal_i| <= offset_i as an LP in
    (c, r).  Raises EmptyPolytopeError when the polytope is infeasible.
    """
    d = poly.dim
    row_norms = np.linalg.norm(poly.normals, axis=1)
    A = np.column_stack([poly.normals, row_norms])
    b = poly._shifted_rhs()
    c_obj = np.zeros(d + 1)
    c_obj[d] = 1.0
    try:
        x, radius = simplex_maximize(c_obj, A, b)
    except InfeasibleError as exc:
        raise EmptyPolytopeError("polytope has no feasible point") from exc
    return x[:d] - poly.box_halfwidth, float(radius)


def maximize_linear(poly: Polytope, direction) -> float:
    """Maximum of direction @ w over the polytope."""
    direction = np.asarray(direction, dtype=float)
    try:
        _, value = simplex_maximize(direction, poly.normals, poly._shifted_rhs())
    except InfeasibleError as exc:
        raise EmptyPolytopeError("polytope has no feasible point") from exc
    return value - poly.box_halfwidth * float(direction.sum())


def hyperplane_intersects(poly: Polytope, a, b: float, tol: float = 1e-9) -> bool:
    """True when a @ w - b attains both signs over the polytope."""
    upper = maximize_linear(poly, a)
    if upper <= b + tol:
        return False
    lower = -maximize_linear(poly, -np.asarray(a, dtype=float))
    return lower < b - tol


def actrank_select(poly: Polytope, pool, rng: np.random.Generator) -> PairQuery:
    """Uniformly random pool pair whose hyperplane still cuts the polytope.

    Scans a random permutation; a pair whose hyperplane passes within the
    Chebyshev radius of the center intersects for free, others get the two
    LP feasibility checks.  Falls back to a uniform random pair when no
    hyperplane intersects.
    """
    if len(pool) == 0:
        raise ValueError("candidate pool is empty")
    center, radius = chebyshev_center(poly)
    if radius <= 0.0:
        raise EmptyPolytopeError("polytope has no interior")
    perm = rng.permutation(len(pool))
    for m in perm:
        a = pool.A[m]
        b = float(pool.b[m])
        dist = abs(float(a @ center) - b) / float(np.linalg.norm(a))
        if dist < radius - 1e-12 or hyperplane_intersects(poly, a, b):
            return pool.pair(int(m))
    return pool.pair(int(perm[0]))


def majority_vote(votes) -> int:
    votes = list(votes)
    if len(votes) % 2 == 0:
        raise ValueError("vote count must be odd")
    return int(sum(votes) * 2 > len(votes))


def actrank_update(poly: Polytope, pair: PairQuery, response: int) -> Polytope:
    """Add the halfspace consistent with the response; discard emptying cuts.

    Response 0 keeps the side closer to p (a @ w >= b); response 1 the other.
    An update that would empty the polytope or collapse the Chebyshev radius
    below 1e-9 is dropped and the previous polytope returned unchanged.
    """
    if response not in (0, 1):
        raise ValueError(f"response must be 0 or 1, got {response}")
    if response == 0:
        cand = poly.with_cut(-pair.a, -pair.b)
    else:
        cand = poly.with_cut(pair.a, pair.b)
    try:
        _, radius = chebyshev_center(cand)
    except EmptyPolytopeError:
        return poly
    if radius <= 1e-9:
        return poly
    return cand


@dataclass
class GaussCloudState:
    """Shrinking Gaussian search cloud: dyadic scale over a stage schedule."""

    stages_total: int
    queries_per_stage: int
    initial_scale: float
    current_center: np.ndarray
    stage: int = 0
    queries_made: int = 0
    stage_scale: float = field(init=False)

    def __post_init__(self):
        if self.stages_total < 1 or self.queries_per_stage < 1:
            raise ValueError("stage schedule must be positive")
        self.current_center = np.asarray(self.current_center, dtype=float)
        self.stage_scale = self.initial_scale * 2.0 ** (-self.stage)


def gausscloud_select(state: GaussCloudState, pool, rng: np.random.Generator) -> PairQuery:
    """Sample a target from the cloud, return the nearest pool hyperplane.

    The target t ~ N(center, scale^2 I); the chosen pair minimizes the point-
    to-hyperplane distance |a @ t - b| / |a| (ties to the lowest pair index).
    Every queries_per_stage calls the stage advances and the scale halves.
    """
    if len(pool) == 0:
        raise ValueError("candidate pool is empty")
    d = state.current_center.shape[0]
    target = state.current_center + state.stage_scale * rng.standard_normal(d)
    dist = np.abs(pool.A @ target - pool.b) / np.linalg.norm(pool.A, axis=1)
    choice = int(np.argmin(dist))
    state.queries_made += 1
    if state.queries_made % state.queries_per_stage == 0:
        state.stage += 1
        state.stage_scale = state.initial_scale * 2.0 ** (-state.stage)
    return pool.pair(choice)
