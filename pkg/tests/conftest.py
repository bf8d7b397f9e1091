import numpy as np
import pytest

from tripledeck import spectral as sp
from tripledeck.selftest import random_state

_CRITERIA = []


def record_criterion(number: int, name: str, passed: bool, detail: str = "") -> None:
    line = f"{'PASS' if passed else 'FAIL'}  criterion {number:2d}  {name}"
    if detail:
        line += f"  [{detail}]"
    _CRITERIA.append((number, line))
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_CRITERIA):
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_grid():
    return sp.Grid(32, 20.0, 64, 12.0)


def rand_state(grid, rng, scale=1.0):
    return random_state(grid, rng, scale)
