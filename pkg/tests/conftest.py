import numpy as np
import pytest

# one "[criterion NN] PASS/FAIL" line per acceptance test, printed at the end
ACCEPTANCE_REPORT = []


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(0xC0FFEE))


def rel_err(a, b):
    denom = max(np.linalg.norm(b), 1e-300)
    return np.linalg.norm(a - b) / denom


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_REPORT:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_REPORT:
            terminalreporter.write_line(line)
