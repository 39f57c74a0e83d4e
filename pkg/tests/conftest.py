import math

import numpy as np
import pytest

from tetraqg.geometry import validate_tetrahedron

ONEQ3 = [(0, 0, 0), (1, 0, 0), (4.91, 3.24, 0), (-3.54, 1.98, 4.58)]
NO_TWO_VERTEX = [(0, 0, 0), (1, 0, 0), (4.40, 2.02, 0), (-0.97, 0.16, 1.46)]
REGULAR = [
    (0, 0, 0),
    (1, 0, 0),
    (0.5, math.sqrt(3) / 2, 0),
    (0.5, math.sqrt(3) / 6, math.sqrt(6) / 3),
]


@pytest.fixture
def oneq3():
    return validate_tetrahedron(ONEQ3)


@pytest.fixture
def regular():
    return validate_tetrahedron(REGULAR)


@pytest.fixture
def no_two_vertex():
    return validate_tetrahedron(NO_TWO_VERTEX)


def random_tetrahedra(n: int, seed: int):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        try:
            out.append(validate_tetrahedron(rng.random((4, 3))))
        except ValueError:
            continue
    return out


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
