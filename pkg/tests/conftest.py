import numpy as np
import pytest

from accelseed import Dataset
from accelseed.bench import gaussian_mixture

ACCEPTANCE_LINES = []


@pytest.fixture
def record_criterion():
    def record(number, ok, detail):
        """ok=None marks a skipped (optional) criterion."""
        verdict = "SKIP" if ok is None else ("PASS" if ok else "FAIL")
        ACCEPTANCE_LINES.append(f"criterion {number}: {verdict}  {detail}")
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def blobs():
    return gaussian_mixture(2000, 3, 12, seed=3)


@pytest.fixture(scope="session")
def two_triads():
    pts = [[0, 0], [1, 0], [0, 1], [100, 100], [101, 100], [100, 101]]
    return Dataset(np.array(pts, dtype=float))
