import pytest

from chizeta.graph import Graph


@pytest.fixture
def c5():
    return Graph.cycle(5)


@pytest.fixture
def petersen():
    return Graph.petersen()


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
