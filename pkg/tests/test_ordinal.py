from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from medoidkit.generators import derive_seed, gaussian_mixture, point_mass, sample, uniform_boxes
from medoidkit.metric_space import DataError, Metric, pairwise_matrix
from medoidkit.ordinal import (RankTable, Scheme, bad_variant_ranks, empirical_pair_cdf,
                               empirical_row_cdf, is_rank_csv, population_pair_cdf_mc,
                               population_s_mc, quadruple_ranks, rank_table, s_rank,
                               triple_ranks)

UNIT = uniform_boxes([((0.0,), (1.0,))])
TWO_GAUSSIANS = gaussian_mixture([(-0.5, 0.0), (0.5, 0.0)], variance=0.05)
RANKERS = [quadruple_ranks, triple_ranks, bad_variant_ranks]


def brute_quadruple(D):
    n = len(D)
    pairs = [D[l][m] for l in range(n) for m in range(l + 1, n)]
    return np.array([[sum(p <= D[i][a] for p in pairs) for a in range(n)] for i in range(n)])


def brute_triple(D):
    n = len(D)
    return np.array([[sum(D[i][j] <= D[i][a] for j in range(n) if j != i) for a in range(n)]
                     for i in range(n)])


def brute_bad(D):
    n = len(D)
    return np.array([[sum(D[j][a] <= D[i][a] for j in range(n)) for a in range(n)] for i in range(n)])


@pytest.fixture
def D3(three_points):
    return pairwise_matrix(three_points, Metric.L1)


def test_quadruple_hand_example(D3):
    t = quadruple_ranks(D3)
    assert t.normalizer == 3
    assert (t.ranks[0, 2], t.ranks[1, 2], t.ranks[0, 1]) == (3, 2, 1)
    assert np.all(np.diag(t.ranks) == 0)


def test_triple_hand_example(D3):
    t = triple_ranks(D3)
    assert t.normalizer == 2
    assert (t.ranks[0, 1], t.ranks[1, 0], t.ranks[2, 1]) == (1, 1, 1)
    assert np.all(np.diag(t.ranks) == 0)


def test_bad_variant_n3_constant(D3):
    t = bad_variant_ranks(D3)
    for a in range(3):
        assert sorted(t.ranks[:, a]) == [1, 2, 3]
        assert s_rank([a], t) == 1.0


@pytest.mark.parametrize("ranker, brute", [(quadruple_ranks, brute_quadruple),
                                           (triple_ranks, brute_triple),
                                           (bad_variant_ranks, brute_bad)])
def test_ranks_match_brute_force_with_ties(ranker, brute, rng):
    X = rng.integers(0, 4, size=(12, 2)).astype(float)  # many tied distances
    D = pairwise_matrix(X, Metric.L1)
    assert np.array_equal(ranker(D).ranks, brute(D))


@pytest.mark.parametrize("ranker", RANKERS)
def test_ranks_need_two_points(ranker):
    with pytest.raises(ValueError):
        ranker(np.zeros((1, 1)))


def test_s_rank_quadruple_hand(D3):
    assert s_rank([1], quadruple_ranks(D3)) == pytest.approx(1 / 3)


@pytest.mark.parametrize("ranker", [quadruple_ranks, triple_ranks])
def test_s_rank_all_points_zero(ranker, rng):
    D = pairwise_matrix(rng.normal(size=(15, 2)), Metric.L2)
    assert s_rank(range(15), ranker(D)) == 0.0


def test_s_rank_bad_variant_n4():
    D = pairwise_matrix(np.array([[0.0], [1.0], [3.0], [7.0]]), Metric.L1)
    t = bad_variant_ranks(D)
    assert all(s_rank([a], t) == 5 / 6 for a in range(4))


def test_s_rank_rejects_empty(D3):
    with pytest.raises(ValueError):
        s_rank([], quadruple_ranks(D3))


@pytest.mark.parametrize("n", [3, 4, 7, 20, 33])
def test_bad_variant_constant_exact(n, rng):
    D = pairwise_matrix(rng.normal(size=(n, 2)), Metric.L2)
    t = bad_variant_ranks(D)
    expected = float(Fraction(n + 1, 2 * (n - 1)))
    assert [s_rank([a], t) for a in range(n)] == [expected] * n


@pytest.mark.parametrize("ranker", RANKERS)
@pytest.mark.parametrize("transform", [lambda t: t**3, np.expm1, lambda t: np.log1p(t) + 7])
def test_monotone_invariance(ranker, transform, rng):
    D = pairwise_matrix(rng.normal(size=(40, 3)), Metric.L2)
    assert ranker(D) == ranker(transform(D))


def test_quadruple_bridge_identity(rng):
    D = pairwise_matrix(rng.normal(size=(30, 2)), Metric.L1)
    t = quadruple_ranks(D)
    cdf = empirical_pair_cdf(D)
    assert np.array_equal(t.ranks / t.normalizer, cdf(D))


def test_triple_bridge_identity(rng):
    D = pairwise_matrix(rng.normal(size=(30, 2)), Metric.LINF)
    t = triple_ranks(D)
    for i in range(30):
        assert np.array_equal(t.ranks[i] / t.normalizer, empirical_row_cdf(D, i)(D[i]))


def test_pair_cdf_examples():
    D = np.array([[0, 1, 3], [1, 0, 2], [3, 2, 0]], dtype=float)
    cdf = empirical_pair_cdf(D)
    assert cdf(2.0) == pytest.approx(2 / 3)
    assert cdf(0.5) == 0.0
    assert cdf(3.0) == 1.0 and cdf(10.0) == 1.0
    assert np.array_equal(cdf.support, [1, 2, 3])
    assert np.allclose(cdf.heights, [1 / 3, 2 / 3, 1])


def test_pair_cdf_needs_two_points():
    with pytest.raises(ValueError):
        empirical_pair_cdf(np.zeros((1, 1)))


def test_population_pair_cdf_point_mass():
    cdf = population_pair_cdf_mc(point_mass((1.0, 2.0)), Metric.L2, 1000, 0)
    assert cdf(0.0) == 1.0 and cdf(-1e-300) == 0.0


def test_population_pair_cdf_uniform():
    cdf = population_pair_cdf_mc(UNIT, Metric.L1, 100_000, 1)
    assert abs(cdf(0.5) - (2 * 0.5 - 0.5**2)) <= 0.02
    grid = np.linspace(-0.1, 1.1, 300)
    assert np.all(np.diff(cdf(grid)) >= 0)


def test_population_pair_cdf_needs_pairs():
    with pytest.raises(ValueError):
        population_pair_cdf_mc(UNIT, Metric.L1, 10, 1)


def test_pair_cdf_converges():
    pop = population_pair_cdf_mc(TWO_GAUSSIANS, Metric.L2, 1_000_000, 99)
    grid = np.linspace(0, 3, 2000)
    med = {}
    for n in (100, 2000):
        errs = [empirical_pair_cdf(pairwise_matrix(sample(TWO_GAUSSIANS, n, derive_seed(n, r)), Metric.L2))
                .sup_distance(pop, grid) for r in range(20)]
        med[n] = np.median(errs)
    assert med[2000] < med[100]


@pytest.mark.parametrize("scheme", [Scheme.QUADRUPLE, Scheme.TRIPLE])
def test_population_s_point_mass(scheme):
    est = population_s_mc([[1.0, 1.0]], point_mass((1.0, 1.0)), Metric.L2, scheme, 1000, 0)
    assert est.value == 1.0


@pytest.mark.parametrize("scheme", [Scheme.QUADRUPLE, Scheme.TRIPLE])
def test_population_s_range_and_monotone(scheme):
    A = np.array([[-0.5, 0.0]])
    B = np.array([[-0.5, 0.0], [0.5, 0.0]])
    a = population_s_mc(A, TWO_GAUSSIANS, Metric.L2, scheme, 2000, 5)
    b = population_s_mc(B, TWO_GAUSSIANS, Metric.L2, scheme, 2000, 5)
    assert 0 <= b.value <= a.value <= 1


def test_population_s_rejects_small_m():
    with pytest.raises(ValueError):
        population_s_mc([[0.0]], UNIT, Metric.L1, Scheme.QUADRUPLE, 10, 0)


def test_srank_tracks_population_s():
    # the rank objective and the plug-in population value agree for large n
    X = sample(TWO_GAUSSIANS, 1500, 3)
    t = quadruple_ranks(pairwise_matrix(X, Metric.L2))
    A = [0, 1]
    pop = population_s_mc(X[A], TWO_GAUSSIANS, Metric.L2, Scheme.QUADRUPLE, 100_000, 4)
    assert abs(s_rank(A, t) - pop.value) < 0.05


@pytest.mark.parametrize("scheme", list(Scheme))
def test_rank_table_csv_roundtrip(scheme, tmp_path, rng):
    D = pairwise_matrix(rng.normal(size=(9, 2)), Metric.L2)
    t = rank_table(D, scheme)
    p = tmp_path / "r.csv"
    t.to_csv(p)
    assert is_rank_csv(p)
    assert RankTable.from_csv(p) == t


def test_rank_table_csv_rejects_bad_normalizer(tmp_path):
    p = tmp_path / "r.csv"
    p.write_text("scheme=quadruple,normalizer=5\n0,1\n1,0\n")
    with pytest.raises(DataError):
        RankTable.from_csv(p)


@settings(max_examples=50, deadline=None)
@given(n=st.integers(2, 25), seed=st.integers(0, 2**32))
def test_rank_bounds(n, seed):
    D = pairwise_matrix(np.random.default_rng(seed).normal(size=(n, 2)), Metric.L2)
    q, t, b = quadruple_ranks(D), triple_ranks(D), bad_variant_ranks(D)
    assert q.ranks.min() >= 0 and q.ranks.max() <= n * (n - 1) // 2
    assert t.ranks.min() >= 0 and t.ranks.max() <= n - 1
    assert b.ranks.min() >= 1 and b.ranks.max() <= n
