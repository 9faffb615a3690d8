import numpy as np
import pytest

from noisyfair.data import LabeledDataset


def random_dataset(rng, n, p=2, d=3, intercept=True):
    X = rng.standard_normal((n, d))
    if intercept:
        X[:, 0] = 1.0
    z = rng.integers(0, p, size=n)
    y = rng.integers(0, 2, size=n)
    return LabeledDataset(X, z, y, (p,))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def separable():
    """Two well separated clusters with an intercept column."""
    r = np.random.default_rng(7)
    n = 200
    y = np.r_[np.zeros(n // 2, int), np.ones(n // 2, int)]
    x = np.where(y[:, None] == 1, 3.0, -3.0) + 0.5 * r.standard_normal((n, 2))
    X = np.hstack([np.ones((n, 1)), x])
    z = r.integers(0, 2, size=n)
    return LabeledDataset(X, z, y, (2,))


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_line():
    """Record one pass/fail line per acceptance criterion for the terminal summary."""

    def record(number, ok, detail):
        status = "SKIP" if ok is None else ("PASS" if ok else "FAIL")
        line = f"criterion {number:>2}: {status}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
