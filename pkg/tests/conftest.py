import numpy as np
import pytest

# pass/fail lines collected by the acceptance suite, echoed after the run
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def assert_within_se(empirical: float, expected: float, se: float, n_se: float = 3.0):
    """Monte Carlo agreement up to ``n_se`` standard errors."""
    assert abs(empirical - expected) <= n_se * se, (
        f"|{empirical} - {expected}| > {n_se} * {se}"
    )


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
