import numpy as np
import pytest

ACCEPTANCE_LINES: list[str] = []


def random_model(rng, n_states, n_obs, n_actions):
    """Random strictly positive ``(A, B, C, D)``."""
    A = rng.dirichlet(np.ones(n_obs), size=n_states).T
    # draws[s, u] is the distribution over s'
    B = rng.dirichlet(np.ones(n_states), size=(n_states, n_actions)).transpose(2, 0, 1)
    C = rng.dirichlet(np.ones(n_obs))
    D = rng.dirichlet(np.ones(n_states))
    return A, B, C, D


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
