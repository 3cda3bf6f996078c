"""Empirical and Monte-Carlo population risks of a set of centers."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .generators import GeneratorSpec, sample
from .metric_space import (DataError, Loss, Metric, as_dataset, directed_hausdorff,
                           loss_apply, nearest_distances)


@dataclass(frozen=True)
class RiskEstimate:
    value: float
    stderr: float
    samples_used: int


def medoid_centers(data, indices) -> np.ndarray:
    """Rows of ``data`` selected by distinct in-range ``indices``."""
    data = as_dataset(data)
    idx = np.asarray(indices, dtype=np.intp).ravel()
    if idx.size == 0:
        raise ValueError("a center set needs at least one index")
    if np.any(idx < 0) or np.any(idx >= data.shape[0]):
        raise IndexError("medoid index out of range")
    if np.unique(idx).size != idx.size:
        raise ValueError("medoid indices must be distinct")
    return data[idx]


def check_centers(centers, dim: int) -> np.ndarray:
    centers = np.asarray(centers, dtype=np.float64)
    if centers.size == 0:
        raise ValueError("center set must be nonempty")
    centers = as_dataset(centers if centers.ndim > 1 or dim == 1 else centers[None, :])
    if centers.shape[1] != dim:
        raise DataError(f"centers have dimension {centers.shape[1]}, data has {dim}")
    return centers


def pointwise_loss(centers, data, metric: Metric, loss: Loss) -> np.ndarray:
    """``min_a phi(d(x_i, a))`` for every data point."""
    data = as_dataset(data)
    centers = check_centers(centers, data.shape[1])
    # phi is non-decreasing, so the min commutes with it
    return loss_apply(loss, nearest_distances(data, centers, metric))


def empirical_risk(centers, data, metric: Metric, loss: Loss) -> float:
    return float(pointwise_loss(centers, data, metric, loss).mean())


def population_risk_mc(centers, generator: GeneratorSpec, metric: Metric, loss: Loss,
                       m: int = 200_000, seed: int = 0) -> RiskEstimate:
    """Monte-Carlo estimate of the population risk from a fresh ``m``-point sample.

    The standard error is the sample standard deviation over ``sqrt(m)``.
    Calls sharing a seed share their sample, which makes differences between
    center sets paired comparisons.
    """
    if m < 100:
        raise ValueError("population_risk_mc needs m >= 100")
    draws = sample(generator, m, seed)
    vals = pointwise_loss(centers, draws, metric, loss)
    return RiskEstimate(float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(m)), m)


def covering_radius(data, reference, metric: Metric) -> float:
    """Largest distance from a reference point to its nearest data point."""
    return directed_hausdorff(reference, data, metric)
