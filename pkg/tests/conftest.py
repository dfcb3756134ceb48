import numpy as np
import pytest

from brcrates.gaussian import GaussianBrcConfig

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    """Collects one verdict line per acceptance criterion for the terminal summary."""
    return _ACCEPTANCE_LINES.append


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def unit_cfg():
    return GaussianBrcConfig(p=10, p1=10, p2=10, n1=1, n2=1, nt1=1, nt2=1,
                             d_y1=1, d_y2=1, d_z1=1, d_z2=1, d_z1y1=1, d_z2y2=1, delta=2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
