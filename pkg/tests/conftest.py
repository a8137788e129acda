import numpy as np
import pytest

from ncebkit.classify import OptimizerConfig

# small budget for paths that only need to find a violation
FAST = OptimizerConfig(restarts=4, max_iter=400)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
