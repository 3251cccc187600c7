import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gossipsim import Graph


@pytest.fixture
def k2():
    return Graph.from_edges(2, [(0, 1)])


@pytest.fixture
def star4():
    # center 0, leaves 1..4
    return Graph.from_edges(5, [(0, i) for i in range(1, 5)])


@pytest.fixture
def path3():
    return Graph.from_edges(3, [(0, 1), (1, 2)])


@pytest.fixture
def ring8():
    return Graph.from_edges(8, [(i, (i + 1) % 8) for i in range(8)])


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
