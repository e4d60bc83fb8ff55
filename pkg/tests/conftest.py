import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_VERDICTS = []


@pytest.fixture
def verdict():
    """Record a PASS/FAIL line for the acceptance summary, then assert."""
    def check(label, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  [{detail}]" if detail else "")
        _VERDICTS.append(line)
        print(line)
        assert ok, line
    return check


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
