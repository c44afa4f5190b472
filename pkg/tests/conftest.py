import itertools

import pytest

from basewalk.matroid import GraphicMatroid, PartitionMatroid, UniformMatroid


@pytest.fixture
def triangle():
    return GraphicMatroid(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def u42():
    return UniformMatroid(4, 2)


@pytest.fixture
def part_small():
    # parts {0, 1} and {2}, capacity one each
    return PartitionMatroid([0, 0, 1], [1, 1])


def subsets(elems):
    elems = list(elems)
    for k in range(len(elems) + 1):
        yield from (frozenset(c) for c in itertools.combinations(elems, k))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
