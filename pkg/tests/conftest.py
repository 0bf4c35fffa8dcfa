import math

import pytest

ACCEPTANCE_LINES = []


def bisect_oracle(f, lo, hi, iterations=60):
    """Plain bisection, kept independent of the package's root finder."""
    f_lo = f(lo)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@pytest.fixture(scope="session")
def w0_oracle():
    return bisect_oracle(lambda w: w - 1 / math.tanh(w), 1.0, 2.0)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
