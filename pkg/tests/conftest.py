import pytest

from xcent.cayley import build_ball
from xcent.maximise import compute_potential
from xcent.presentations import load


@pytest.fixture(scope="session")
def free():
    return load("free2")


@pytest.fixture(scope="session")
def genus():
    return load("genus2_e1")


@pytest.fixture(scope="session")
def free_ball(free):
    return build_ball(free, 9)


@pytest.fixture(scope="session")
def genus_ball5(genus):
    return build_ball(genus, 5)


@pytest.fixture(scope="session")
def free_pt(free, free_ball):
    return compute_potential(free, 8, ball=free_ball)


@pytest.fixture(scope="session")
def genus_pt4(genus, genus_ball5):
    # C = 2 certifies radius 4 on a radius-5 ball
    return compute_potential(genus, 4, ball=genus_ball5)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
