import sys
import numpy as np
import pytest

from medoidkit import Loss, Metric


@pytest.fixture
def four_points():
    return np.array([[0.0], [1.0], [10.0], [11.0]])


@pytest.fixture
def three_points():
    return np.array([[0.0], [1.0], [3.0]])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ALL_METRICS = list(Metric)
ALL_LOSSES = list(Loss)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
