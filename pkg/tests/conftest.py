import numpy as np
import pytest

from trellis_isac.constellation import qam16_signbit


def direct_idft(X):
    n = len(X)
    k = np.arange(n)
    return np.array([np.sum(X * np.exp(2j * np.pi * k * m / n)) for m in range(n)]) / np.sqrt(n)


def direct_autocorr(x):
    n = len(x)
    return np.array([sum(np.conj(x[i]) * x[i + l] for i in range(n - l)) for l in range(n)])


def random_qam16(rng, n):
    return qam16_signbit().points[rng.integers(0, 16, n)]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.RESULTS, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
