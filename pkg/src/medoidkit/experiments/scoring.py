"""Partition agreement and center-recovery scores."""
from __future__ import annotations

import itertools

import numpy as np


def _comb2(x):
    x = np.asarray(x, dtype=np.float64)
    return x * (x - 1) / 2


def adjusted_rand_index(labels_a, labels_b) -> float:
    """Chance-corrected Rand index computed from the contingency table."""
    a = np.asarray(labels_a).ravel()
    b = np.asarray(labels_b).ravel()
    if a.size != b.size:
        raise ValueError(f"label vectors differ in length: {a.size} vs {b.size}")
    if a.size < 2:
        raise ValueError("ARI needs at least two labelled points")
    _, ia = np.unique(a, return_inverse=True)
    _, ib = np.unique(b, return_inverse=True)
    table = np.zeros((ia.max() + 1, ib.max() + 1), dtype=np.int64)
    np.add.at(table, (ia, ib), 1)
    sum_cells = _comb2(table).sum()
    sum_a = _comb2(table.sum(axis=1)).sum()
    sum_b = _comb2(table.sum(axis=0)).sum()
    total = _comb2(a.size)
    expected = sum_a * sum_b / total
    max_index = (sum_a + sum_b) / 2
    if max_index == expected:
        # both partitions trivial (all singletons or one block): identical by construction
        return 1.0
    return float((sum_cells - expected) / (max_index - expected))


def average_center_error(estimated, truth) -> float:
    """Mean Euclidean distance between centers under the best one-to-one matching."""
    est = np.atleast_2d(np.asarray(estimated, dtype=float))
    tru = np.atleast_2d(np.asarray(truth, dtype=float))
    if est.shape != tru.shape:
        raise ValueError(f"center sets differ in shape: {est.shape} vs {tru.shape}")
    k = est.shape[0]
    if k > 8:
        raise ValueError("exhaustive matching is limited to k <= 8")
    cost = np.sqrt(((est[:, None, :] - tru[None, :, :]) ** 2).sum(axis=2))
    rows = np.arange(k)
    return float(min(cost[rows, list(p)].mean() for p in itertools.permutations(range(k))))
