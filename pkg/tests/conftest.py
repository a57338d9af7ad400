import numpy as np
import pytest

from segen.datasets import load_sbm300
from segen.graph import Graph


def star5():
    return Graph.from_edges([(0, 1), (0, 2), (0, 3), (0, 4)])


def path4():
    return Graph.from_edges([(0, 1), (1, 2), (2, 3)])


def triangle():
    return Graph.from_edges([(0, 1), (1, 2), (0, 2)])


def cycle(n):
    return Graph.from_edges([(i, (i + 1) % n) for i in range(n)])


@pytest.fixture
def STAR5():
    return star5()


@pytest.fixture
def PATH4():
    return path4()


@pytest.fixture
def TRIANGLE():
    return triangle()


@pytest.fixture(scope="session")
def sbm300():
    return load_sbm300()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_CRITERIA = {}


@pytest.fixture
def criterion(request):
    """Record ``(number, passed, detail)`` for the acceptance summary."""

    def record(number, passed, detail):
        _CRITERIA[number] = (bool(passed), detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        passed, detail = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
