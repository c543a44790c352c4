import pytest

from sl2tilt.limitfn import default_model

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def psi_model():
    return default_model()


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
