import math

import numpy as np
import pytest

from qwre.environment import Environment


def random_env(rng, extent):
    return Environment.from_window(-extent, rng.uniform(-math.pi, math.pi, 2 * extent + 1))


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def env_factory(rng):
    def make(extent=12, omega0=None):
        env = random_env(rng, extent)
        return env if omega0 is None else env.with_phase(0, omega0)

    return make


# one line per acceptance criterion, echoed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
