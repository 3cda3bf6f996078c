"""Rank-only clustering objectives.

Three ways of turning a distance matrix into integer ranks ``R_i(a)``:

* quadruple: ``d(x_i, x_a)`` is ranked against every pairwise distance
  ``d(x_l, x_m)``, ``l < m`` (a global ordering of dissimilarities);
* triple: ``d(x_i, x_a)`` is ranked against the distances from ``x_i`` to
  the other points (one ordering per anchor);
* bad variant: ``d(x_i, x_a)`` is ranked against the distances from every
  point to ``x_a``. With ``k = 1`` its objective is the same for every medoid,
  so it cannot separate clusters; it is kept as a negative control.

A rank counts comparisons with ``<=``, so ties share the larger count and a
rank divided by its normalizer is exactly an empirical CDF value.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.stats import rankdata

from .generators import GeneratorSpec, sample
from .metric_space import DataError, Metric, nearest_distances
from .risk import RiskEstimate, check_centers


class Scheme(enum.Enum):
    QUADRUPLE = "quadruple"
    TRIPLE = "triple"
    BAD_VARIANT = "bad-variant"


@dataclass(frozen=True, eq=False)
class RankTable:
    scheme: Scheme
    ranks: np.ndarray
    normalizer: int

    @property
    def n(self) -> int:
        return self.ranks.shape[0]

    def __eq__(self, other):
        if not isinstance(other, RankTable):
            return NotImplemented
        return (self.scheme is other.scheme and self.normalizer == other.normalizer
                and np.array_equal(self.ranks, other.ranks))

    def dumps(self) -> str:
        lines = [f"scheme={self.scheme.value},normalizer={self.normalizer}"]
        lines += [",".join(map(str, row)) for row in self.ranks.tolist()]
        return "\n".join(lines) + "\n"

    def to_csv(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def from_csv(cls, path) -> "RankTable":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise DataError(f"cannot read {path}: {exc.strerror or exc}") from exc
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise DataError(f"{path} is empty")
        try:
            header = dict(field.split("=", 1) for field in lines[0].split(","))
            scheme = Scheme(header["scheme"].strip())
            normalizer = int(header["normalizer"])
            ranks = np.array([[int(v) for v in ln.split(",")] for ln in lines[1:]], dtype=np.int64)
        except (ValueError, KeyError) as exc:
            raise DataError(f"{path} is not a rank table: {exc}") from exc
        if ranks.ndim != 2 or ranks.shape[0] != ranks.shape[1] or ranks.shape[0] < 2:
            raise DataError(f"{path}: rank matrix must be square with n >= 2")
        if normalizer != _normalizer(scheme, ranks.shape[0]):
            raise DataError(f"{path}: normalizer {normalizer} inconsistent with n={ranks.shape[0]}")
        return cls(scheme, ranks, normalizer)


def is_rank_csv(path) -> bool:
    try:
        with open(path) as fh:
            return fh.readline().startswith("scheme=")
    except OSError:
        return False


def _normalizer(scheme: Scheme, n: int) -> int:
    return n * (n - 1) // 2 if scheme is Scheme.QUADRUPLE else n - 1


def _check_matrix(D) -> np.ndarray:
    D = np.asarray(D, dtype=np.float64)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise DataError("distance matrix must be square")
    if D.shape[0] < 2:
        raise ValueError("rank tables need at least two points")
    return D


def _pair_distances(D: np.ndarray) -> np.ndarray:
    iu = np.triu_indices(D.shape[0], k=1)
    return D[iu]


def quadruple_ranks(D) -> RankTable:
    D = _check_matrix(D)
    pairs = np.sort(_pair_distances(D))
    ranks = np.searchsorted(pairs, D, side="right").astype(np.int64)
    return RankTable(Scheme.QUADRUPLE, ranks, _normalizer(Scheme.QUADRUPLE, D.shape[0]))


def triple_ranks(D) -> RankTable:
    D = _check_matrix(D)
    # "max" rank counts entries <= each value; drop the self-comparison d(x_i, x_i) = 0
    ranks = rankdata(D, method="max", axis=1).astype(np.int64) - 1
    return RankTable(Scheme.TRIPLE, ranks, _normalizer(Scheme.TRIPLE, D.shape[0]))


def bad_variant_ranks(D) -> RankTable:
    D = _check_matrix(D)
    ranks = rankdata(D, method="max", axis=0).astype(np.int64)
    return RankTable(Scheme.BAD_VARIANT, ranks, _normalizer(Scheme.BAD_VARIANT, D.shape[0]))


RANKERS = {
    Scheme.QUADRUPLE: quadruple_ranks,
    Scheme.TRIPLE: triple_ranks,
    Scheme.BAD_VARIANT: bad_variant_ranks,
}


def rank_table(D, scheme: Scheme) -> RankTable:
    return RANKERS[Scheme(scheme)](D)


def s_rank(medoids, table: RankTable) -> float:
    """Average over points of the smallest normalized rank to a medoid.

    The sum is taken over integers and divided once, so the value depends
    only on the multiset of minimal ranks.
    """
    idx = np.asarray(medoids, dtype=np.intp).ravel()
    if idx.size == 0:
        raise ValueError("medoid set must be nonempty")
    if np.any(idx < 0) or np.any(idx >= table.n):
        raise IndexError("medoid index out of range")
    total = int(table.ranks[:, idx].min(axis=1).sum())
    return total / (table.n * table.normalizer)


class CdfEstimate:
    """Right-continuous empirical CDF of a finite sample of values."""

    def __init__(self, values):
        values = np.sort(np.asarray(values, dtype=np.float64).ravel())
        if values.size == 0:
            raise ValueError("a CDF needs at least one value")
        self.values = values

    @property
    def size(self) -> int:
        return self.values.size

    @property
    def support(self) -> np.ndarray:
        return np.unique(self.values)

    @property
    def heights(self) -> np.ndarray:
        return self(self.support)

    def __call__(self, t):
        counts = np.searchsorted(self.values, t, side="right")
        if np.ndim(counts) == 0:
            return int(counts) / self.size
        return counts / self.size

    def sup_distance(self, other: "CdfEstimate", grid=None) -> float:
        """Sup-norm gap to ``other`` over ``grid`` (default: both supports)."""
        if grid is None:
            grid = np.concatenate([self.values, other.values])
        return float(np.max(np.abs(self(grid) - other(grid))))


def empirical_pair_cdf(D) -> CdfEstimate:
    return CdfEstimate(_pair_distances(_check_matrix(D)))


def empirical_row_cdf(D, i: int) -> CdfEstimate:
    """CDF of the distances from point ``i`` to the other points."""
    D = _check_matrix(D)
    return CdfEstimate(np.delete(D[i], i))


def _distance_draws(generator: GeneratorSpec, metric: Metric, m_pairs: int, seed: int) -> np.ndarray:
    pts = sample(generator, 2 * m_pairs, seed)
    x, y = pts[:m_pairs], pts[m_pairs:]
    diff = np.abs(x - y)
    if metric is Metric.L1:
        return diff.sum(axis=1)
    if metric is Metric.L2:
        return np.sqrt((diff * diff).sum(axis=1))
    return diff.max(axis=1)


def population_pair_cdf_mc(generator: GeneratorSpec, metric: Metric, m_pairs: int = 1_000_000,
                           seed: int = 0) -> CdfEstimate:
    """Distribution of ``d(X, X')`` for independent draws, from ``m_pairs`` pairs."""
    if m_pairs < 1000:
        raise ValueError("population_pair_cdf_mc needs m_pairs >= 1000")
    return CdfEstimate(_distance_draws(generator, metric, m_pairs, seed))


def population_s_mc(centers, generator: GeneratorSpec, metric: Metric, scheme: Scheme,
                    m: int = 10_000, seed: int = 0) -> RiskEstimate:
    """Monte-Carlo population value of the rank objective at free ``centers``.

    Quadruple: plug in an ``m``-pair estimate of the pairwise-distance CDF.
    Triple: for every outer draw ``x`` estimate the CDF of ``d(x, X')`` from
    ``ceil(sqrt(m))`` fresh inner draws (nested Monte Carlo).
    """
    scheme = Scheme(scheme)
    if m < 1000:
        raise ValueError("population_s_mc needs m >= 1000")
    if scheme is Scheme.BAD_VARIANT:
        raise ValueError("no population objective is defined for the bad variant")
    centers = check_centers(centers, generator.dimension)
    rng = np.random.default_rng(seed)
    outer_seed, inner_seed = (int(s) for s in rng.integers(0, 2**63, size=2))
    outer = sample(generator, m, outer_seed)
    # G is non-decreasing, so min over centers commutes with it
    nearest = nearest_distances(outer, centers, metric)
    if scheme is Scheme.QUADRUPLE:
        cdf = population_pair_cdf_mc(generator, metric, m, inner_seed)
        vals = cdf(nearest)
    else:
        inner_n = math.ceil(math.sqrt(m))
        inner = sample(generator, m * inner_n, inner_seed).reshape(m, inner_n, -1)
        vals = np.empty(m)
        chunk = max(1, 200_000 // inner_n)
        for s in range(0, m, chunk):
            x = outer[s:s + chunk]
            diff = np.abs(inner[s:s + chunk] - x[:, None, :])
            if metric is Metric.L1:
                d = diff.sum(axis=2)
            elif metric is Metric.L2:
                d = np.sqrt((diff * diff).sum(axis=2))
            else:
                d = diff.max(axis=2)
            vals[s:s + chunk] = (d <= nearest[s:s + chunk, None]).mean(axis=1)
    return RiskEstimate(float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(m)), m)
