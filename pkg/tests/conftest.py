import pytest

from patcover.graph import generate_grid, generate_perturbed_subgrid
from patcover import rng as rngmod

# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def grid40():
    g, _ = generate_grid(2, 40)
    return g


@pytest.fixture(scope="session")
def small_subgrids():
    out = []
    for i in range(40):
        g, _ = generate_perturbed_subgrid(2, 5, 0.25, rngmod.stream(11, i))
        out.append(g)
    return out
