import numpy as np
import pytest

from hotelling_quality import FacilityConfig


def random_configs(rng, n):
    """Uniform random valid configurations (a <= b)."""
    out = []
    for _ in range(n):
        a, b = np.sort(rng.uniform(0.0, 1.0, 2))
        out.append(FacilityConfig(float(a), float(b), float(rng.uniform())))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
