"""K-medoids solvers over a per-point score matrix, and generalized K-means.

Every K-medoids objective here has the form

    cost(A) = sum_i min_{a in A} scores[i, a] / (n * scale)

where ``scores`` is ``phi(D)`` for metric K-medoids (``scale = 1``) or an
integer rank matrix for ordinal K-medoids (``scale`` = the rank
normalizer). Integer scores are summed exactly, so ties and plateaus in the
ordinal objectives are resolved without rounding noise.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .metric_space import (DataError, Loss, Metric, as_dataset, cross_distances, distance,
                           loss_apply, pairwise_matrix)
from .ordinal import RankTable

IMPROVEMENT_EPS = 1e-12
EXACT_MAX_N = 25


class Objective:
    """K-medoids objective backed by an ``(n, n)`` score matrix."""

    def __init__(self, scores: np.ndarray, scale: int | float = 1, name: str = "custom"):
        scores = np.asarray(scores)
        if scores.ndim != 2 or scores.shape[0] != scores.shape[1]:
            raise DataError("score matrix must be square")
        if np.issubdtype(scores.dtype, np.integer):
            scores = scores.astype(np.int64)
        else:
            scores = scores.astype(np.float64)
        self.scores = scores
        self.scale = scale
        self.name = name

    @classmethod
    def metric(cls, D, loss: Loss = Loss.IDENTITY) -> "Objective":
        return cls(loss_apply(loss, np.asarray(D, dtype=np.float64)), 1, f"metric-{loss.value}")

    @classmethod
    def from_data(cls, data, metric: Metric, loss: Loss = Loss.IDENTITY) -> "Objective":
        return cls.metric(pairwise_matrix(data, metric), loss)

    @classmethod
    def ordinal(cls, table: RankTable) -> "Objective":
        return cls(table.ranks, table.normalizer, f"ordinal-{table.scheme.value}")

    @property
    def n(self) -> int:
        return self.scores.shape[0]

    @property
    def exact_integer(self) -> bool:
        return self.scores.dtype == np.int64

    def total(self, medoids) -> int | float:
        return self.scores[:, np.asarray(medoids, dtype=np.intp)].min(axis=1).sum().item()

    def to_cost(self, total) -> float:
        return total / (self.n * self.scale)

    def cost(self, medoids) -> float:
        return self.to_cost(self.total(_check_medoids(medoids, self.n)))

    def labels(self, medoids) -> np.ndarray:
        """Position in ``medoids`` of each point's best medoid; ties go to the first."""
        return np.argmin(self.scores[:, np.asarray(medoids, dtype=np.intp)], axis=1)


@dataclass
class Solution:
    labels: np.ndarray
    cost: float
    medoids: np.ndarray | None = None
    centers: np.ndarray | None = None
    iterations: int = 0
    converged: bool = True
    history: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    def same_as(self, other: "Solution") -> bool:
        def eq(a, b):
            return (a is None and b is None) or (a is not None and b is not None
                                                 and np.array_equal(a, b))
        return (eq(self.medoids, other.medoids) and eq(self.centers, other.centers)
                and np.array_equal(self.labels, other.labels) and self.cost == other.cost)


def _check_medoids(medoids, n: int, k: int | None = None) -> np.ndarray:
    idx = np.asarray(medoids, dtype=np.intp).ravel()
    if idx.size == 0:
        raise ValueError("medoid set must be nonempty")
    if k is not None and idx.size != k:
        raise ValueError(f"expected {k} medoids, got {idx.size}")
    if np.any(idx < 0) or np.any(idx >= n):
        raise IndexError("medoid index out of range")
    if np.unique(idx).size != idx.size:
        raise ValueError("medoid indices must be distinct")
    return idx


def _check_k(n: int, k: int) -> None:
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > n:
        raise ValueError(f"k={k} exceeds the number of points n={n}")


def _solution(obj: Objective, medoids, **kw) -> Solution:
    medoids = np.asarray(medoids, dtype=np.intp)
    return Solution(labels=obj.labels(medoids), cost=obj.cost(medoids), medoids=medoids, **kw)


def exact_kmedoids(obj: Objective, k: int, n: int | None = None, batch: int = 4096) -> Solution:
    """Global optimum by enumerating all ``C(n, k)`` medoid sets.

    Ties go to the lexicographically smallest index set.
    """
    n = obj.n if n is None else n
    _check_k(n, k)
    if n > EXACT_MAX_N:
        raise ValueError(f"exhaustive search is limited to n <= {EXACT_MAX_N}; "
                         "use pam_swap or multi_start for larger problems")
    best_total, best = None, None
    combos = itertools.combinations(range(n), k)
    while True:
        chunk = np.array(list(itertools.islice(combos, batch)), dtype=np.intp)
        if chunk.size == 0:
            break
        totals = obj.scores[:, chunk].min(axis=2).sum(axis=0)
        j = int(np.argmin(totals))
        if best_total is None or totals[j] < best_total:
            best_total, best = totals[j], chunk[j]
    return _solution(obj, best, diagnostics={"subsets": math.comb(n, k)})


def greedy_build_init(obj: Objective, k: int, n: int | None = None) -> np.ndarray:
    """BUILD-style seeding: best singleton, then greedily the most helpful point."""
    n = obj.n if n is None else n
    _check_k(n, k)
    S = obj.scores
    first = int(np.argmin(S.sum(axis=0)))
    medoids = [first]
    current = S[:, first].copy()
    for _ in range(1, k):
        totals = np.minimum(S, current[:, None]).sum(axis=0)
        if obj.exact_integer:
            totals = totals.astype(np.float64)
        totals[medoids] = np.inf
        c = int(np.argmin(totals))
        medoids.append(c)
        current = np.minimum(current, S[:, c])
    return np.array(medoids, dtype=np.intp)


def _swap_totals(S: np.ndarray, medoids: np.ndarray) -> np.ndarray:
    """``(k, n)`` objective totals after replacing medoid ``j`` by point ``c``."""
    k = medoids.size
    sub = S[:, medoids]
    if k == 1:
        return S.sum(axis=0, dtype=np.float64)[None, :]
    order = np.argsort(sub, axis=1, kind="stable")
    rows = np.arange(S.shape[0])
    nearest = order[:, 0]
    d1 = sub[rows, nearest]
    d2 = sub[rows, order[:, 1]]
    out = np.empty((k, S.shape[0]))
    for j in range(k):
        base = np.where(nearest == j, d2, d1)
        out[j] = np.minimum(S, base[:, None]).sum(axis=0)
    return out


def pam_swap(obj: Objective, k: int, init, max_iter: int = 100, n: int | None = None) -> Solution:
    """Best-improvement swap local search.

    Each iteration scans all ``k * (n - k)`` medoid/non-medoid swaps and
    applies the best one if it lowers the cost by more than ``1e-12``.
    """
    n = obj.n if n is None else n
    _check_k(n, k)
    medoids = _check_medoids(init, n, k).copy()
    S = obj.scores
    total = obj.total(medoids)
    history = [obj.to_cost(total)]
    swaps, converged = 0, False
    while swaps < max_iter:
        totals = _swap_totals(S, medoids)
        totals[:, medoids] = np.inf
        j, c = np.unravel_index(int(np.argmin(totals)), totals.shape)
        if obj.exact_integer:
            # float64 holds these integer totals exactly at the sizes used here
            new_total = int(totals[j, c])
        else:
            new_total = float(totals[j, c])
        if obj.to_cost(total) - obj.to_cost(new_total) <= IMPROVEMENT_EPS:
            converged = True
            break
        medoids[j] = c
        total = obj.total(medoids)
        history.append(obj.to_cost(total))
        swaps += 1
    else:
        converged = _is_local_optimum(obj, medoids)
    return _solution(obj, medoids, iterations=swaps, converged=converged, history=history)


def _is_local_optimum(obj: Objective, medoids: np.ndarray) -> bool:
    totals = _swap_totals(obj.scores, medoids)
    totals[:, medoids] = np.inf
    return obj.to_cost(obj.total(medoids)) - obj.to_cost(totals.min()) <= IMPROVEMENT_EPS


def multi_start(obj: Objective, k: int, starts: int = 10, seed: int = 0,
                max_iter: int = 100, n: int | None = None) -> Solution:
    """Best swap search over a greedy start and ``starts - 1`` random starts.

    The winner is the lowest cost, earliest start on ties, so the result
    does not depend on the order in which starts are run.
    """
    n = obj.n if n is None else n
    _check_k(n, k)
    if starts < 1:
        raise ValueError("starts must be at least 1")
    rng = np.random.default_rng(seed)
    inits = [greedy_build_init(obj, k)]
    inits += [np.sort(rng.choice(n, size=k, replace=False)) for _ in range(starts - 1)]
    best, costs = None, []
    for init in inits:
        sol = pam_swap(obj, k, init, max_iter=max_iter)
        costs.append(sol.cost)
        if best is None or sol.cost < best.cost:
            best = sol
    best.diagnostics = {"start_costs": costs, "starts": starts}
    return best


# ---------------------------------------------------------------------------
# generalized K-means

@dataclass(frozen=True)
class SupportSpec:
    """Union of closed axis-aligned boxes, or unrestricted when empty."""

    boxes: tuple = ()

    def __post_init__(self):
        boxes = []
        for lo, hi in self.boxes:
            lo, hi = np.asarray(lo, float).ravel(), np.asarray(hi, float).ravel()
            if lo.shape != hi.shape or not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
                raise DataError("support boxes need finite bounds of equal dimension")
            if np.any(lo > hi):
                raise DataError("support box with lower > upper")
            boxes.append((lo, hi))
        object.__setattr__(self, "boxes", tuple(boxes))

    @property
    def unrestricted(self) -> bool:
        return not self.boxes

    def project(self, x, metric: Metric) -> np.ndarray:
        """Nearest point of the union; ties go to the lowest box index."""
        x = np.asarray(x, dtype=float)
        if self.unrestricted:
            return x
        best, best_d = None, np.inf
        for lo, hi in self.boxes:
            y = np.clip(x, lo, hi)
            d = distance(metric, x, y)
            if d < best_d:
                best, best_d = y, d
        return best


UNRESTRICTED = SupportSpec()


def assign_labels(centers, data, metric: Metric, loss: Loss) -> np.ndarray:
    """Index of the nearest center under ``phi(d(x, a))``; ties go to the lowest index."""
    data = as_dataset(data)
    centers = as_dataset(np.asarray(centers, dtype=float).reshape(-1, data.shape[1]))
    return np.argmin(loss_apply(loss, cross_distances(data, centers, metric)), axis=1)


def _cluster_cost(c, pts, metric: Metric, loss: Loss) -> float:
    return float(loss_apply(loss, cross_distances(pts, np.atleast_2d(c), metric)[:, 0]).sum())


def weiszfeld(pts: np.ndarray, start=None, max_steps: int = 200, tol: float = 1e-10) -> np.ndarray:
    """Geometric median under L2; stops on a data point if an iterate lands on one."""
    y = pts.mean(axis=0) if start is None else np.asarray(start, dtype=float)
    for _ in range(max_steps):
        d = np.sqrt(((pts - y) ** 2).sum(axis=1))
        hit = d < 1e-12
        if np.any(hit):
            return pts[np.argmax(hit)].copy()
        w = 1.0 / d
        y_new = (pts * w[:, None]).sum(axis=0) / w.sum()
        if np.sqrt(((y_new - y) ** 2).sum()) < tol:
            return y_new
        y = y_new
    return y


def _cluster_medoid(pts: np.ndarray, metric: Metric, loss: Loss) -> np.ndarray:
    costs = loss_apply(loss, pairwise_matrix(pts, metric)).sum(axis=0)
    return pts[int(np.argmin(costs))]


def _simplex_center(pts: np.ndarray, metric: Metric, loss: Loss, max_iter: int = 200) -> np.ndarray:
    x0 = _cluster_medoid(pts, metric, loss)
    edge = 0.1 * (pts.max(axis=0) - pts.min(axis=0))
    edge[edge <= 0] = 1e-3
    simplex = np.vstack([x0, x0 + np.diag(edge)])
    res = minimize(lambda c: _cluster_cost(c, pts, metric, loss), x0, method="Nelder-Mead",
                   options={"maxiter": max_iter, "initial_simplex": simplex,
                            "xatol": 1e-10, "fatol": 1e-12})
    if _cluster_cost(res.x, pts, metric, loss) <= _cluster_cost(x0, pts, metric, loss):
        return res.x
    return x0


def update_center(pts: np.ndarray, metric: Metric, loss: Loss) -> np.ndarray:
    """Best center for one cluster under ``(metric, loss)``."""
    if metric is Metric.L2 and loss is Loss.SQUARE:
        return pts.mean(axis=0)
    if metric is Metric.L1 and loss is Loss.IDENTITY:
        return np.median(pts, axis=0)
    if metric is Metric.L2 and loss is Loss.IDENTITY:
        return weiszfeld(pts)
    return _simplex_center(pts, metric, loss)


def generalized_kmeans(data, metric: Metric, loss: Loss, k: int, init,
                       support: SupportSpec = UNRESTRICTED, max_iter: int = 100,
                       tol: float = 1e-10) -> Solution:
    """Lloyd-style alternation between nearest-center assignment and center updates.

    An updated center is kept only if it does not raise its cluster's cost,
    then projected onto ``support``. An empty cluster is reseeded at the
    point farthest from its current center.
    """
    data = as_dataset(data)
    n, dim = data.shape
    _check_k(n, k)
    centers = np.array(init, dtype=float).reshape(-1, dim)
    if centers.shape[0] != k:
        raise ValueError(f"expected {k} initial centers, got {centers.shape[0]}")
    if not np.all(np.isfinite(centers)):
        raise DataError("initial centers must be finite")
    centers = np.array([support.project(c, metric) for c in centers])

    def evaluate(c):
        losses = loss_apply(loss, cross_distances(data, c, metric))
        lab = np.argmin(losses, axis=1)
        return lab, losses[np.arange(n), lab]

    labels, point_loss = evaluate(centers)
    cost = float(point_loss.mean())
    history = [cost]
    converged, it = False, 0
    for it in range(1, max_iter + 1):
        new = centers.copy()
        taken = set()
        for j in range(k):
            members = labels == j
            if not np.any(members):
                order = np.argsort(-point_loss, kind="stable")
                far = next(i for i in order if i not in taken)
                taken.add(far)
                new[j] = data[far]
                continue
            pts = data[members]
            cand = update_center(pts, metric, loss)
            if _cluster_cost(cand, pts, metric, loss) <= _cluster_cost(centers[j], pts, metric, loss):
                new[j] = cand
            new[j] = support.project(new[j], metric)
        centers = new
        labels, point_loss = evaluate(centers)
        new_cost = float(point_loss.mean())
        history.append(new_cost)
        decrease = cost - new_cost
        cost = new_cost
        if decrease < tol:
            converged = True
            break
    return Solution(labels=labels, cost=cost, centers=centers, iterations=it,
                    converged=converged, history=history)


def kmedoids_points(data, metric: Metric, loss: Loss, k: int, starts: int = 10,
                    seed: int = 0) -> tuple[Solution, Objective]:
    """Metric K-medoids straight from coordinates."""
    obj = Objective.from_data(data, metric, loss)
    sol = multi_start(obj, k, starts=starts, seed=seed)
    sol.centers = as_dataset(data)[sol.medoids]
    return sol, obj


def support_from_boxes(boxes: Sequence) -> SupportSpec:
    return SupportSpec(tuple((b.lower, b.upper) if hasattr(b, "lower") else b for b in boxes))
