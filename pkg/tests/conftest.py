import numpy as np
import pytest

from specabs.approx import MemoField
from specabs.problems import benchmark_field

_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def oscillator_fields():
    """Memoized oscillator fields shared by every test of the session."""
    return {name: MemoField(benchmark_field(name))
            for name in ("OSC_SAE", "OSC_MSSAE", "OSC_MNSSAE")}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def acceptance_log():
    """Collects one verdict line per acceptance criterion."""
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
