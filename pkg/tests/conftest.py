import numpy as np
import pytest

from degcpd.core import SnapshotGraph


def graph(pairs, nodes=None, index=0):
    return SnapshotGraph.from_edges(index, np.asarray(pairs, dtype=np.int64).reshape(-1, 2), nodes=nodes)


@pytest.fixture
def make_graph():
    return graph


# one line per acceptance criterion, filled by tests/test_acceptance.py
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
