import pytest

from magcolloid.potential import LJParams

ACCEPTANCE_LINES = []


def record(line):
    ACCEPTANCE_LINES.append(line)
    print(line)


@pytest.fixture
def lj_default():
    return LJParams()


@pytest.fixture
def lj36():
    return LJParams(alpha=36.0, beta=3.0)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
