"""Large-sample diagnostics: medoid-vs-K-means risk gap, uniform convergence, covering radius."""
from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass

import numpy as np

from ..generators import GeneratorSpec, derive_seed, sample
from ..metric_space import Loss, Metric, cross_distances, loss_apply
from ..risk import covering_radius, empirical_risk, population_risk_mc
from ..solvers import SupportSpec, UNRESTRICTED, generalized_kmeans, kmedoids_points

CONVERGENCE_HEADER = ("n", "replications", "gap_median", "gap_stderr_median", "gap_min_slack",
                      "sup_error_median", "covering_radius_median")


@dataclass
class ConvergenceRow:
    n: int
    replications: int
    gap_median: float
    gap_stderr_median: float
    gap_min_slack: float
    sup_error_median: float
    covering_radius_median: float


@dataclass
class ConvergenceResult:
    rows: list
    gaps: dict
    gap_stderrs: dict
    sup_errors: dict
    covering_radii: dict

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CONVERGENCE_HEADER)
        for r in self.rows:
            d = asdict(r)
            w.writerow([d["n"], d["replications"]] + [f"{d[c]:.8g}" for c in CONVERGENCE_HEADER[2:]])
        return buf.getvalue()


def support_of(generator: GeneratorSpec) -> SupportSpec:
    if generator.boxes:
        return SupportSpec(tuple((b.lower, b.upper) for b in generator.boxes))
    return UNRESTRICTED


def reference_points(generator: GeneratorSpec, seed: int, size: int = 2500) -> np.ndarray:
    """Fixed points probing the support: a grid over boxes, or a large draw otherwise."""
    if generator.boxes:
        per_box = max(2, int(round((size / len(generator.boxes)) ** (1 / generator.dimension))))
        grids = []
        for b in generator.boxes:
            axes = [np.linspace(lo, hi, per_box) for lo, hi in zip(b.lower, b.upper)]
            mesh = np.meshgrid(*axes, indexing="ij")
            grids.append(np.stack([m.ravel() for m in mesh], axis=1))
        return np.vstack(grids)
    return sample(generator, size, seed)


def random_center_sets(generator: GeneratorSpec, k: int, count: int, seed: int) -> np.ndarray:
    """``count`` k-tuples of points drawn from the generator, shape ``(count, k, d)``."""
    return sample(generator, count * k, seed).reshape(count, k, generator.dimension)


def sup_risk_error(data, center_sets, population_values, metric: Metric, loss: Loss) -> float:
    """``max_j |L(A_j, Q_n) - L(A_j, Q)|`` over the supplied center sets."""
    count, k, dim = center_sets.shape
    d = cross_distances(data, center_sets.reshape(count * k, dim), metric)
    emp = loss_apply(loss, d.reshape(-1, count, k).min(axis=2)).mean(axis=0)
    return float(np.max(np.abs(emp - population_values)))


def convergence_study(generator: GeneratorSpec, metric: Metric, loss: Loss, k: int,
                      n_grid, replications: int = 20, base_seed: int = 0, starts: int = 5,
                      mc_samples: int = 200_000, n_center_sets: int = 100) -> ConvergenceResult:
    """Per sample size: the population-risk gap between the K-medoids solution and
    K-means restricted to the support (initialised at the medoids, evaluated on a
    shared Monte-Carlo sample), the sup-error of the empirical risk over fixed
    random center sets, and the covering radius of the sample.
    """
    n_grid = [int(n) for n in n_grid]
    if any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ValueError("n_grid must be strictly increasing")
    support = support_of(generator)
    center_sets = random_center_sets(generator, k, n_center_sets, derive_seed(base_seed, 0xC5))
    pop_draws = sample(generator, mc_samples, derive_seed(base_seed, 0xA11))
    pop_values = np.array([empirical_risk(A, pop_draws, metric, loss) for A in center_sets])
    reference = reference_points(generator, derive_seed(base_seed, 0x2EF))

    gaps, stderrs, sups, radii, rows = {}, {}, {}, {}, []
    for n in n_grid:
        g, s, e, c = [], [], [], []
        for r in range(replications):
            seed = derive_seed(base_seed, (n << 20) + r)
            data = sample(generator, n, seed)
            med, _ = kmedoids_points(data, metric, loss, k, starts=starts, seed=seed)
            km = generalized_kmeans(data, metric, loss, k, init=data[med.medoids], support=support)
            mc_seed = derive_seed(seed, 0x9C)
            risk_med = population_risk_mc(data[med.medoids], generator, metric, loss, mc_samples, mc_seed)
            risk_km = population_risk_mc(km.centers, generator, metric, loss, mc_samples, mc_seed)
            g.append(risk_med.value - risk_km.value)
            s.append(risk_med.stderr + risk_km.stderr)
            e.append(sup_risk_error(data, center_sets, pop_values, metric, loss))
            c.append(covering_radius(data, reference, metric))
        g, s = np.array(g), np.array(s)
        gaps[n], stderrs[n], sups[n], radii[n] = g, s, np.array(e), np.array(c)
        rows.append(ConvergenceRow(
            n=n, replications=replications, gap_median=float(np.median(g)),
            gap_stderr_median=float(np.median(s)),
            gap_min_slack=float(np.min(g + 6 * s)),
            sup_error_median=float(np.median(e)),
            covering_radius_median=float(np.median(c))))
    return ConvergenceResult(rows, gaps, stderrs, sups, radii)
