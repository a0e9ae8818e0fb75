import numpy as np
import pytest

from crisisgc.series import Ensemble

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def make_ensemble(matrix, ids=None, start="2000-01-03"):
    matrix = np.asarray(matrix, dtype=float)
    ids = ids or [f"S{k}" for k in range(matrix.shape[0])]
    dates = np.datetime64(start, "D") + np.arange(matrix.shape[1])
    return Ensemble.from_matrix(ids, dates, matrix)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
