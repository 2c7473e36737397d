import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from radbound.body import Ball, Body, ball_body, make_cutthetip  # noqa: E402
from radbound.spaceform import SpaceForm  # noqa: E402

ACCEPTANCE_LINES = []

PLANE = SpaceForm(0, 2)
SPACE = SpaceForm(0, 3)
SPHERE = SpaceForm(1, 2)


@pytest.fixture(scope="session")
def two_disks():
    return Body(PLANE, (Ball(np.array([0.5, 0.0]), 1.0), Ball(np.array([-0.5, 0.0]), 1.0)))


@pytest.fixture(scope="session")
def cutthetip():
    return make_cutthetip(1.0, 0.5, 0.1)


@pytest.fixture(scope="session")
def unit_disk():
    return ball_body(PLANE, 1.0)


@pytest.fixture(scope="session")
def unit_ball():
    return ball_body(SPACE, 1.0)


@pytest.fixture(scope="session")
def cap_body():
    """Three caps on the 2-sphere around the pole."""
    pole = np.array([0.0, 0.0, 1.0])
    cs = []
    for ang in (0.0, 2.1, 4.0):
        v = np.array([math.cos(ang), math.sin(ang), 0.0])
        cs.append(math.cos(0.3) * pole + math.sin(0.3) * v)
    return Body(SPHERE, tuple(Ball(c / np.linalg.norm(c), r) for c, r in zip(cs, (0.7, 0.6, 0.75))))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
