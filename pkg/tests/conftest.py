import numpy as np
import pytest

import mnarmc.linalg as la

ACCEPTANCE = []


@pytest.fixture(params=["compiled", "python"])
def backend(request):
    prev = la.BACKEND
    try:
        la.set_backend(request.param)
    except ImportError:
        pytest.skip("compiled kernel not built")
    yield request.param
    la.set_backend(prev)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
