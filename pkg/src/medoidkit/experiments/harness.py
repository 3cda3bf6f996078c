"""Replicated clustering experiments and their CSV/Markdown reports."""
from __future__ import annotations

import csv
import io
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from ..generators import GeneratorSpec, derive_seed, sample
from ..metric_space import DataError, Loss, Metric, pairwise_matrix
from ..ordinal import Scheme, rank_table
from ..solvers import Objective, generalized_kmeans, multi_start
from .scoring import adjusted_rand_index, average_center_error

log = logging.getLogger(__name__)

METHODS = ("KMeans", "KMedoids", "OrdinalQuadruple", "OrdinalTriple", "BadVariant")
ORDINAL_SCHEMES = {
    "OrdinalQuadruple": Scheme.QUADRUPLE,
    "OrdinalTriple": Scheme.TRIPLE,
    "BadVariant": Scheme.BAD_VARIANT,
}
REPORT_HEADER = ("method", "metric", "loss", "ari_mean", "ari_sd", "center_err_mean",
                 "center_err_sd", "cost_mean", "runtime_ms_mean")

# the five metric/loss rows of the two-Gaussian and three-Gaussian tables
TABLE_ROWS = (
    (Metric.L1, Loss.IDENTITY),
    (Metric.L2, Loss.SQRT),
    (Metric.L2, Loss.IDENTITY),
    (Metric.L2, Loss.SQUARE),
    (Metric.LINF, Loss.IDENTITY),
)
ROW_LABELS = {
    (Metric.L1, Loss.IDENTITY): "L1",
    (Metric.L2, Loss.SQRT): "sqrt(L2)",
    (Metric.L2, Loss.IDENTITY): "L2",
    (Metric.L2, Loss.SQUARE): "L2^2",
    (Metric.LINF, Loss.IDENTITY): "Linf",
}


@dataclass(frozen=True)
class ExperimentConfig:
    generator: GeneratorSpec
    n: int
    k: int
    metric_losses: tuple = TABLE_ROWS
    methods: tuple = ("KMeans", "KMedoids")
    replications: int = 50
    starts: int = 20
    base_seed: int = 0
    population_mc_samples: int = 200_000

    def __post_init__(self):
        rows = tuple((Metric(m), Loss(l)) for m, l in self.metric_losses)
        object.__setattr__(self, "metric_losses", rows)
        object.__setattr__(self, "methods", tuple(self.methods))
        if self.replications < 1:
            raise ValueError("replications must be at least 1")
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.n < self.k:
            raise ValueError("n must be at least k")
        if self.starts < 1:
            raise ValueError("starts must be at least 1")
        if not rows:
            raise ValueError("at least one metric/loss pair is required")
        unknown = set(self.methods) - set(METHODS)
        if unknown or not self.methods:
            raise ValueError(f"unknown methods {sorted(unknown)}; choose from {METHODS}")

    def to_dict(self) -> dict:
        return {
            "generator": self.generator.to_dict(),
            "n": self.n,
            "k": self.k,
            "metric_losses": [[m.value, l.value] for m, l in self.metric_losses],
            "methods": list(self.methods),
            "replications": self.replications,
            "starts": self.starts,
            "base_seed": self.base_seed,
            "population_mc_samples": self.population_mc_samples,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        allowed = set(cls.__dataclass_fields__)
        extra = set(d) - allowed
        if extra:
            raise DataError(f"unknown config fields: {sorted(extra)}")
        missing = {"generator", "n", "k"} - set(d)
        if missing:
            raise DataError(f"missing config fields: {sorted(missing)}")
        kw = dict(d)
        kw["generator"] = GeneratorSpec.from_dict(d["generator"])
        try:
            return cls(**kw)
        except (TypeError, ValueError) as exc:
            raise DataError(f"invalid config: {exc}") from exc

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        try:
            return cls.from_dict(json.loads(Path(path).read_text()))
        except OSError as exc:
            raise DataError(f"cannot read {path}: {exc.strerror or exc}") from exc
        except json.JSONDecodeError as exc:
            raise DataError(f"{path} is not valid JSON: {exc}") from exc


@dataclass
class MethodResult:
    method: str
    metric: Metric
    loss: Loss
    ari: float
    center_error: float
    cost: float
    runtime_ms: float
    medoids: np.ndarray | None = None
    centers: np.ndarray | None = None
    labels: np.ndarray | None = None


@dataclass
class ReportRow:
    method: str
    metric: str
    loss: str
    ari_mean: float
    ari_sd: float
    center_err_mean: float
    center_err_sd: float
    cost_mean: float
    runtime_ms_mean: float
    per_replication_ari: list = field(default_factory=list, repr=False)


def _solve_replication(config: ExperimentConfig, rep: int) -> list[MethodResult]:
    seed = derive_seed(config.base_seed, rep)
    data, truth = sample(config.generator, config.n, seed, return_labels=True)
    true_centers = config.generator.means
    solver_seed = derive_seed(seed, 0x5EED)
    results = []
    dist_cache, rank_cache = {}, {}

    def center_error(centers):
        if centers.shape != true_centers.shape:
            return float("nan")
        return average_center_error(centers, true_centers)

    for metric, loss in config.metric_losses:
        if metric not in dist_cache:
            dist_cache[metric] = pairwise_matrix(data, metric)
        D = dist_cache[metric]
        medoid_sol, medoid_ms = None, 0.0
        for method in config.methods:
            t0 = time.perf_counter()
            if method in ("KMedoids", "KMeans"):
                if medoid_sol is None:
                    medoid_sol = multi_start(Objective.metric(D, loss), config.k,
                                             starts=config.starts, seed=solver_seed)
                    medoid_ms = (time.perf_counter() - t0) * 1000
                    t0 = time.perf_counter()
                sol = medoid_sol
                if method == "KMeans":
                    # K-means is refined from the medoid solution, so it is charged for it
                    sol = generalized_kmeans(data, metric, loss, config.k,
                                             init=data[medoid_sol.medoids])
                    centers = sol.centers
                else:
                    centers = data[sol.medoids]
            else:
                key = (metric, ORDINAL_SCHEMES[method])
                if key not in rank_cache:
                    # ranks ignore the loss, so rows sharing a metric share the solve
                    ordinal_sol = multi_start(Objective.ordinal(rank_table(D, key[1])), config.k,
                                              starts=config.starts, seed=solver_seed)
                    rank_cache[key] = ordinal_sol, (time.perf_counter() - t0) * 1000
                sol, solve_ms = rank_cache[key]
                centers = data[sol.medoids]
            if method in ORDINAL_SCHEMES:
                elapsed = solve_ms
            else:
                elapsed = (time.perf_counter() - t0) * 1000 + medoid_ms
            results.append(MethodResult(
                method, metric, loss, adjusted_rand_index(truth, sol.labels),
                center_error(centers), sol.cost, elapsed,
                medoids=sol.medoids, centers=centers, labels=sol.labels))
    return results


def _aggregate(config: ExperimentConfig, per_rep: list[list[MethodResult]]) -> list[ReportRow]:
    def sd(x):
        return float(np.std(x, ddof=1)) if len(x) > 1 else 0.0

    rows = []
    n_items = len(per_rep[0])
    for j in range(n_items):
        items = [rep[j] for rep in per_rep]
        ari = [r.ari for r in items]
        err = [r.center_error for r in items]
        rows.append(ReportRow(
            method=items[0].method, metric=items[0].metric.value, loss=items[0].loss.value,
            ari_mean=float(np.mean(ari)), ari_sd=sd(ari),
            center_err_mean=float(np.mean(err)), center_err_sd=sd(err),
            cost_mean=float(np.mean([r.cost for r in items])),
            runtime_ms_mean=float(np.mean([r.runtime_ms for r in items])),
            per_replication_ari=ari))
    return rows


def run_replications_detailed(config: ExperimentConfig, workers: int = 1) -> list[list[MethodResult]]:
    """Per-replication results, ordered by replication index whatever ``workers`` is."""
    reps = range(config.replications)
    if workers <= 1:
        out = []
        for r in reps:
            out.append(_solve_replication(config, r))
            log.debug("replication %d/%d done", r + 1, config.replications)
        return out
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_solve_replication, [config] * config.replications, reps))


def run_replications(config: ExperimentConfig, workers: int = 1) -> list[ReportRow]:
    return _aggregate(config, run_replications_detailed(config, workers))


def _fmt(x: float) -> str:
    return "nan" if np.isnan(x) else f"{x:.6f}"


def report_csv(rows: list[ReportRow], timing: bool = True) -> str:
    """CSV text; with ``timing=False`` the runtime column is written as 0 so output is reproducible."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_HEADER)
    for r in rows:
        d = asdict(r)
        vals = [d["method"], d["metric"], d["loss"]]
        vals += [_fmt(d[c]) for c in REPORT_HEADER[3:-1]]
        vals.append(f"{r.runtime_ms_mean:.1f}" if timing else "0")
        w.writerow(vals)
    return buf.getvalue()


def report_markdown(rows: list[ReportRow]) -> str:
    """One block per metric/loss row with method columns, as in the published tables."""
    methods = list(dict.fromkeys(r.method for r in rows))
    keys = list(dict.fromkeys((r.metric, r.loss) for r in rows))
    by = {(r.method, r.metric, r.loss): r for r in rows}
    lines = ["| metric/loss | score | " + " | ".join(methods) + " |",
             "|---|---|" + "---|" * len(methods)]
    for m, l in keys:
        label = ROW_LABELS.get((Metric(m), Loss(l)), f"{m}/{l}")
        err = [f"{by[(meth, m, l)].center_err_mean:.2e} ({by[(meth, m, l)].center_err_sd:.1e})"
               for meth in methods]
        ari = [f"{by[(meth, m, l)].ari_mean:.3f} ({by[(meth, m, l)].ari_sd:.3f})" for meth in methods]
        lines.append(f"| {label} | error | " + " | ".join(err) + " |")
        lines.append("|  | ARI | " + " | ".join(ari) + " |")
    return "\n".join(lines) + "\n"
