import numpy as np
import pytest

from nblearn.graph import build_graph
from nblearn.exceptions import NotStronglyConnected

ACCEPTANCE_LINES = []


def record(criterion, ok, detail):
    """Remember one acceptance verdict; the lines are printed after the run."""
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}")
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_strongly_connected(rng, n, p=0.5):
    """Erdos-Renyi digraph (self-loops added) resampled until strongly connected."""
    while True:
        edges = [(i, j) for i in range(n) for j in range(n) if i != j and rng.random() < p]
        try:
            return build_graph(n, edges)
        except NotStronglyConnected:
            continue


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
