"""Named experiment configurations."""
from __future__ import annotations

import math

import numpy as np

from ..generators import GeneratorSpec, derive_seed, gaussian_mixture, sample, uniform_boxes
from ..metric_space import Loss, Metric
from ..solvers import SupportSpec, generalized_kmeans, kmedoids_points
from .harness import TABLE_ROWS, ExperimentConfig

TWO_GAUSSIANS = gaussian_mixture([(-0.5, 0.0), (0.5, 0.0)], variance=0.05)
THREE_GAUSSIANS = gaussian_mixture([(-0.5, 0.0), (0.5, 0.0), (0.0, math.sqrt(3) / 2)],
                                   variance=0.05)
SPLIT_INTERVAL = uniform_boxes([((-2.0,), (-1.0,)), ((1.0,), (2.0,))])

GENERATORS = {
    "table1": TWO_GAUSSIANS,
    "table2": THREE_GAUSSIANS,
    "bad-variant": THREE_GAUSSIANS,
    "interval-example": SPLIT_INTERVAL,
}


def preset(name: str, base_seed: int = 0, replications: int | None = None,
           starts: int | None = None) -> ExperimentConfig:
    if name == "table1":
        cfg = dict(generator=TWO_GAUSSIANS, n=2000, k=2, methods=("KMeans", "KMedoids"),
                   replications=50, starts=20)
    elif name == "table2":
        cfg = dict(generator=THREE_GAUSSIANS, n=750, k=3,
                   methods=("OrdinalTriple", "OrdinalQuadruple", "KMedoids"),
                   replications=50, starts=20)
    elif name == "bad-variant":
        cfg = dict(generator=THREE_GAUSSIANS, n=750, k=3, methods=("BadVariant", "KMedoids"),
                   replications=50, starts=20)
    elif name == "interval-example":
        cfg = dict(generator=SPLIT_INTERVAL, n=2000, k=1, methods=("KMedoids", "KMeans"),
                   metric_losses=((Metric.L1, Loss.IDENTITY),), replications=20, starts=5)
    else:
        raise ValueError(f"unknown preset {name!r}")
    cfg.setdefault("metric_losses", TABLE_ROWS)
    if replications is not None:
        cfg["replications"] = replications
    if starts is not None:
        cfg["starts"] = starts
    return ExperimentConfig(base_seed=base_seed, **cfg)


PRESETS = tuple(GENERATORS)


def interval_example(n: int = 2000, replications: int = 20, base_seed: int = 0,
                     metric: Metric = Metric.L1, loss: Loss = Loss.IDENTITY,
                     generator: GeneratorSpec = SPLIT_INTERVAL) -> dict:
    """Single-center fits on the split interval: medoid, free center, support-restricted center.

    Returns arrays of length ``replications`` keyed ``medoid``,
    ``kmeans`` and ``restricted``.
    """
    support = SupportSpec(tuple((b.lower, b.upper) for b in generator.boxes))
    out = {"medoid": [], "kmeans": [], "restricted": []}
    for r in range(replications):
        seed = derive_seed(base_seed, r)
        data = sample(generator, n, seed)
        sol, _ = kmedoids_points(data, metric, loss, 1, starts=1, seed=seed)
        medoid = data[sol.medoids[0]]
        free = generalized_kmeans(data, metric, loss, 1, init=medoid)
        restricted = generalized_kmeans(data, metric, loss, 1, init=medoid, support=support)
        out["medoid"].append(float(medoid[0]))
        out["kmeans"].append(float(free.centers[0, 0]))
        out["restricted"].append(float(restricted.centers[0, 0]))
    return {key: np.array(v) for key, v in out.items()}
