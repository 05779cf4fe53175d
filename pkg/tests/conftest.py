import math

import numpy as np
import pytest

from metagabor import frames, sigrid


@pytest.fixture(scope="session")
def grid():
    return sigrid.default_grid()


@pytest.fixture(scope="session")
def gauss(grid):
    return sigrid.gaussian(grid)


@pytest.fixture(scope="session")
def hermites(grid):
    return [sigrid.hermite(grid, k) for k in range(9)]


@pytest.fixture(scope="session")
def fgrid():
    return frames.frame_grid()


@pytest.fixture(scope="session")
def fgauss(fgrid):
    return sigrid.gaussian(fgrid)


def gaussian_values(t):
    return 2 ** 0.25 * np.exp(-math.pi * np.asarray(t) ** 2)


# one line per acceptance criterion, filled by test_acceptance.py
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
