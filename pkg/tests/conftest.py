import numpy as np
import pytest

from siegeltl.siegel import siegel_point


def random_point(rng, p, scale=1.0):
    X = rng.normal(scale=scale, size=(p, p))
    A = rng.normal(scale=0.7, size=(p, p))
    return siegel_point(0.5 * (X + X.T), A @ A.T + 0.5 * np.eye(p))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
