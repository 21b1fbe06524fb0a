import itertools

import numpy as np
import pytest

from jetgroupoid.lie import MatrixGroup

GROUP_TAGS = ["gl3", "sl2", "so3"]

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(params=GROUP_TAGS)
def group(request):
    return MatrixGroup.from_tag(request.param)


def set_partitions(elements):
    """All unordered set partitions, blocks as sorted tuples (brute force)."""
    elements = list(elements)
    if not elements:
        yield []
        return
    first, rest = elements[0], elements[1:]
    for sub in set_partitions(rest):
        yield [(first,)] + sub
        for i in range(len(sub)):
            yield sub[:i] + [tuple(sorted((first,) + sub[i]))] + sub[i + 1 :]


def ordered_set_partitions(j):
    """Every ordering of every set partition of {1..j}; blocks ascending."""
    for sp in set_partitions(range(1, j + 1)):
        for perm in itertools.permutations(sp):
            yield tuple(perm)


def bell_triangle(count):
    """Bell numbers B_1..B_count read off the Bell (Aitken) triangle."""
    row = [1]
    out = [row[-1]]
    while len(out) < count:
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
        out.append(row[-1])
    return out
