import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from medoidkit.metric_space import (DataError, Loss, Metric, diameter_bound, directed_hausdorff,
                                    distance, load_csv, loss_apply, pairwise_matrix)

from .conftest import ALL_LOSSES, ALL_METRICS


@pytest.mark.parametrize("metric, x, y, expected", [
    (Metric.L1, (0, 0), (1, 1), 2.0),
    (Metric.LINF, (0, 0), (1, 1), 1.0),
    (Metric.L2, (0, 0), (3, 4), 5.0),
])
def test_distance_examples(metric, x, y, expected):
    assert distance(metric, x, y) == expected


def test_distance_dimension_mismatch():
    with pytest.raises(DataError):
        distance(Metric.L2, (0, 0), (1, 2, 3))


def test_distance_rejects_nan():
    with pytest.raises(DataError):
        distance(Metric.L1, (np.nan, 0), (1, 2))


@pytest.mark.parametrize("metric", ALL_METRICS)
def test_triangle_inequality_random_triples(metric, rng):
    for _ in range(10_000 // 100):
        pts = rng.normal(size=(100, 3, 4)) * rng.uniform(0.1, 10)
        for x, y, z in pts:
            assert distance(metric, x, z) <= distance(metric, x, y) + distance(metric, y, z) + 1e-12


@pytest.mark.parametrize("metric", ALL_METRICS)
@given(x=arrays(np.float64, 3, elements=st.integers(-10**6, 10**6).map(lambda v: v / 1000)),
       y=arrays(np.float64, 3, elements=st.integers(-10**6, 10**6).map(lambda v: v / 1000)))
def test_metric_axioms(metric, x, y):
    d = distance(metric, x, y)
    assert d >= 0
    assert d == distance(metric, y, x)
    assert (d == 0) == bool(np.all(x == y))


@pytest.mark.parametrize("loss, t, expected", [
    (Loss.IDENTITY, 2.0, 2.0),
    (Loss.SQUARE, 3.0, 9.0),
    (Loss.SQRT, 4.0, 2.0),
])
def test_loss_examples(loss, t, expected):
    assert loss_apply(loss, t) == expected
    assert loss(t) == expected


@pytest.mark.parametrize("loss", ALL_LOSSES)
def test_loss_rejects_negative(loss):
    with pytest.raises(ValueError):
        loss_apply(loss, -0.1)


@pytest.mark.parametrize("loss", ALL_LOSSES)
def test_loss_monotone_and_zero_only_at_zero(loss, rng):
    grid = np.sort(rng.uniform(0, 50, size=2000))
    vals = loss_apply(loss, grid)
    assert np.all(np.diff(vals) >= 0)
    assert loss_apply(loss, 0.0) == 0.0
    assert np.all(vals[grid > 0] > 0)


@pytest.mark.parametrize("loss", ALL_LOSSES)
@settings(max_examples=300)
@given(s=st.floats(0, 1), t=st.floats(0, 1), diam=st.floats(0.01, 100))
def test_modulus_dominates(loss, s, t, diam):
    s, t = s * diam, t * diam
    assert abs(loss_apply(loss, s) - loss_apply(loss, t)) <= loss.modulus(abs(s - t), diam) + 1e-12


@pytest.mark.parametrize("loss", ALL_LOSSES)
def test_modulus_is_a_modulus(loss):
    h = np.linspace(0, 5, 200)
    w = loss.modulus(h, 5.0)
    assert loss.modulus(0.0, 5.0) == 0.0
    assert np.all(np.diff(w) >= 0)


def test_modulus_is_attained_for_square():
    # sup over |s-t| = h on [0, D] of s^2 - t^2 is reached at s = D, t = D - h
    D, h = 3.0, 0.7
    assert Loss.SQUARE.modulus(h, D) == pytest.approx(D**2 - (D - h) ** 2)


def test_pairwise_three_points(three_points):
    D = pairwise_matrix(three_points, Metric.L1)
    assert (D[0, 1], D[0, 2], D[1, 2]) == (1.0, 3.0, 2.0)
    assert np.array_equal(D, D.T)
    assert np.all(np.diag(D) == 0)


def test_pairwise_single_point():
    D = pairwise_matrix([[1.0, 2.0]], Metric.L2)
    assert D.shape == (1, 1) and D[0, 0] == 0.0


def test_pairwise_duplicate_points():
    D = pairwise_matrix([[1.0, 2.0], [1.0, 2.0], [0.0, 0.0]], Metric.L2)
    assert D[0, 1] == 0.0


@pytest.mark.parametrize("metric", ALL_METRICS)
def test_pairwise_matches_distance(metric, rng):
    X = rng.normal(size=(30, 3))
    D = pairwise_matrix(X, metric)
    for i in range(30):
        for j in range(30):
            assert D[i, j] == pytest.approx(distance(metric, X[i], X[j]), rel=1e-15, abs=1e-15)


def test_directed_hausdorff_examples():
    A = np.array([[0.0], [5.0]])
    assert directed_hausdorff(A, A, Metric.L1) == 0.0
    assert directed_hausdorff(A, np.array([[0.0], [5.0], [7.0]]), Metric.L1) == 0.0
    assert directed_hausdorff(A, np.array([[1.0]]), Metric.L1) == 4.0
    # asymmetric
    assert directed_hausdorff(np.array([[1.0]]), A, Metric.L1) == 1.0


def test_directed_hausdorff_empty():
    with pytest.raises(DataError):
        directed_hausdorff(np.empty((0, 1)), np.array([[1.0]]), Metric.L1)


@given(a=st.lists(st.integers(0, 6), min_size=1, max_size=5),
       b=st.lists(st.integers(0, 6), min_size=1, max_size=5))
def test_hausdorff_zero_both_ways_iff_equal_sets(a, b):
    A = np.array(a, dtype=float)[:, None]
    B = np.array(b, dtype=float)[:, None]
    both_zero = directed_hausdorff(A, B, Metric.L2) == 0 and directed_hausdorff(B, A, Metric.L2) == 0
    assert both_zero == (set(a) == set(b))


def test_diameter_bound(rng):
    X = rng.uniform(size=(50, 2))
    exact = pairwise_matrix(X, Metric.L2).max()
    assert diameter_bound(X, metric=Metric.L2) == pytest.approx(exact * 1.01)
    big = rng.uniform(size=(5000, 2))
    assert diameter_bound(big, metric=Metric.L2) >= pairwise_matrix(big[:500], Metric.L2).max()


def test_load_csv_with_and_without_header(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("x,y\n0,1\n2.5,3\n")
    assert np.array_equal(load_csv(p), [[0, 1], [2.5, 3]])
    q = tmp_path / "b.csv"
    q.write_text("0,1\n2.5,3\n")
    assert np.array_equal(load_csv(q), [[0, 1], [2.5, 3]])


@pytest.mark.parametrize("text", ["x,y\n", "0,1\n2\n", "0,1\nabc,2\n", "0,inf\n", ""])
def test_load_csv_errors(tmp_path, text):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    with pytest.raises(DataError):
        load_csv(p)


def test_load_csv_missing(tmp_path):
    with pytest.raises(DataError):
        load_csv(tmp_path / "nope.csv")
