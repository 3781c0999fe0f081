import numpy as np
import pytest

from distortion_sensitivity import Dataset, Exponential, gamma_prior


@pytest.fixture
def conj():
    """Exponential likelihood, Gamma(1, 1) prior, two observations equal to 1."""
    return Exponential(), gamma_prior(1.0, 1.0), Dataset([1.0, 1.0])


@pytest.fixture
def rng():
    return np.random.default_rng(20240101)


_ACCEPTANCE = {}


@pytest.fixture
def verdict(request):
    """Record a PASS/FAIL line for an acceptance criterion, then assert it."""

    def record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
        _ACCEPTANCE[number] = line
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[k])
