import numpy as np
import pytest

from netlinsolve.linalg import build_system

# criterion id -> (passed, detail); filled by test_acceptance
ACCEPTANCE_RESULTS = {}


def random_system(n, seed, low=-1.0, high=1.0):
    rng = np.random.default_rng(seed)
    A = rng.uniform(low, high, size=(n, n))
    x = rng.uniform(low, high, size=n)
    return build_system(A, A @ x)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: int(k.split("-")[1])):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"{key:6s} {'PASS' if ok else 'FAIL'}  {detail}")
