"""Points, metrics, losses and pairwise/set distances on finite-dimensional real spaces.

Datasets are plain ``(n, d)`` float64 arrays; :func:`as_dataset` validates
them. Metrics are the three classical norms, losses are the monotone
transforms applied on top of a metric.
"""
from __future__ import annotations

import csv
import enum
import math
from pathlib import Path

import numpy as np
from scipy.spatial.distance import pdist, squareform


class DataError(ValueError):
    """Malformed input data (bad shapes, non-finite values, unreadable files)."""


class Metric(enum.Enum):
    L1 = "l1"
    L2 = "l2"
    LINF = "linf"

    @property
    def scipy_name(self) -> str:
        return {"l1": "cityblock", "l2": "euclidean", "linf": "chebyshev"}[self.value]


class Loss(enum.Enum):
    IDENTITY = "id"
    SQRT = "sqrt"
    SQUARE = "square"

    def __call__(self, t):
        return loss_apply(self, t)

    def modulus(self, h, diameter: float):
        """Modulus of continuity of the loss on ``[0, diameter]``.

        Exact supremum of ``|phi(s) - phi(t)|`` over ``s, t`` in
        ``[0, diameter]`` with ``|s - t| <= h``; ``h`` is clipped to the
        interval.
        """
        h = np.clip(np.asarray(h, dtype=float), 0.0, diameter)
        if self is Loss.IDENTITY:
            out = h
        elif self is Loss.SQRT:
            out = np.sqrt(h)
        else:
            out = h * (2.0 * diameter - h)
        return out if out.ndim else float(out)


def as_dataset(points) -> np.ndarray:
    """Coerce ``points`` to a validated ``(n, d)`` float64 array.

    One-dimensional input is read as ``n`` points on the real line.
    """
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DataError(f"expected a non-empty (n, d) point array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DataError("points must have finite coordinates")
    return arr


def _as_point(x) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if arr.ndim != 1:
        raise DataError("a point must be a flat coordinate vector")
    if not np.all(np.isfinite(arr)):
        raise DataError("points must have finite coordinates")
    return arr


def distance(metric: Metric, x, y) -> float:
    x, y = _as_point(x), _as_point(y)
    if x.shape != y.shape:
        raise DataError(f"dimension mismatch: {x.shape[0]} vs {y.shape[0]}")
    diff = np.abs(x - y)
    if metric is Metric.L1:
        return float(diff.sum())
    if metric is Metric.L2:
        return float(np.sqrt(np.dot(diff, diff)))
    return float(diff.max())


def loss_apply(loss: Loss, t):
    """Apply ``loss`` to a nonnegative scalar or array of distances."""
    arr = np.asarray(t, dtype=np.float64)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise ValueError("loss is only defined for nonnegative distances")
    if loss is Loss.IDENTITY:
        out = arr
    elif loss is Loss.SQRT:
        out = np.sqrt(arr)
    else:
        out = arr * arr
    return out if out.ndim else float(out)


def pairwise_matrix(data, metric: Metric) -> np.ndarray:
    """Dense symmetric ``(n, n)`` distance matrix with an exact zero diagonal."""
    data = as_dataset(data)
    if data.shape[0] == 1:
        return np.zeros((1, 1))
    return squareform(pdist(data, metric.scipy_name))


def cross_distances(a, b, metric: Metric) -> np.ndarray:
    """``(len(a), len(b))`` matrix of distances between two point sets."""
    a, b = as_dataset(a), as_dataset(b)
    if a.shape[1] != b.shape[1]:
        raise DataError(f"dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    diff = np.abs(a[:, None, :] - b[None, :, :])
    if metric is Metric.L1:
        return diff.sum(axis=2)
    if metric is Metric.L2:
        return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    return diff.max(axis=2)


def nearest_distances(points, centers, metric: Metric, chunk: int = 20000) -> np.ndarray:
    """Distance from each point to its nearest center, computed in chunks."""
    points, centers = as_dataset(points), as_dataset(centers)
    out = np.empty(points.shape[0])
    for start in range(0, points.shape[0], chunk):
        block = cross_distances(points[start:start + chunk], centers, metric)
        out[start:start + chunk] = block.min(axis=1)
    return out


def directed_hausdorff(A, B, metric: Metric) -> float:
    """``sup_{a in A} min_{b in B} d(a, b)``; zero iff every point of A is in B."""
    A, B = as_dataset(A), as_dataset(B)
    return float(nearest_distances(A, B, metric).max())


def diameter_bound(*point_sets, metric: Metric, inflate: float = 1.01) -> float:
    """Max pairwise distance of the union of ``point_sets``, inflated slightly.

    Unions too large for an exact pairwise scan fall back to the diameter of
    their bounding box, which can only overestimate.
    """
    union = np.vstack([as_dataset(p) for p in point_sets])
    if union.shape[0] <= 3000:
        diam = float(pdist(union, metric.scipy_name).max()) if union.shape[0] > 1 else 0.0
    else:
        lo, hi = union.min(axis=0), union.max(axis=0)
        diam = distance(metric, lo, hi)
    return diam * inflate


def load_csv(path) -> np.ndarray:
    """Read one point per row; a non-numeric first row is treated as a header."""
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from exc
    if not rows:
        raise DataError(f"{path} contains no data rows")

    def parse(row):
        return [float(c) for c in row]

    try:
        parse(rows[0])
    except ValueError:
        rows = rows[1:]
    try:
        values = [parse(r) for r in rows]
    except ValueError as exc:
        raise DataError(f"{path}: non-numeric value ({exc})") from exc
    if not values:
        raise DataError(f"{path} contains a header but no data rows")
    if len({len(v) for v in values}) != 1:
        raise DataError(f"{path}: rows have differing numbers of columns")
    if any(not math.isfinite(c) for v in values for c in v):
        raise DataError(f"{path}: non-finite coordinate")
    return as_dataset(values)
