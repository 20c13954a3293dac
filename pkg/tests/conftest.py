import numpy as np
import pytest


def random_sphere(n, count, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((count, n + 1))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def random_hemisphere(n, count, seed=0):
    x = random_sphere(n, count, seed)
    x[:, -1] = np.abs(x[:, -1])
    return x


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
