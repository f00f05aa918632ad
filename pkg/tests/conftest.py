import numpy as np
import pytest

from graphtest import generate
from graphtest.rng import substream

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    """Record a one-line verdict for the acceptance summary."""
    def _report(criterion, passed, detail=""):
        ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}")
        return passed
    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_graph(seed, n_range=(2, 60)):
    """Erdos-Renyi graph with random size and density, sometimes disconnected."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(*n_range, endpoint=True))
    p = float(rng.uniform(0.02, 0.6))
    return generate("erdos_renyi", n, p=p, rng=substream(seed, 99))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
