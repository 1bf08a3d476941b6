import numpy as np
import pytest

from subjet.models import build_hamiltonian, build_lagrangian


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def free():
    return build_lagrangian("free-particle")


@pytest.fixture(scope="session")
def charged():
    return build_lagrangian("charged-particle", {"potential": {"kind": "magnetic", "B": 1.3}})


@pytest.fixture(scope="session")
def nambu_goto():
    return build_lagrangian("nambu-goto")


@pytest.fixture(scope="session")
def quad():
    return build_lagrangian("quadratic-control")


@pytest.fixture(scope="session")
def string_h():
    return build_hamiltonian("string-hamiltonian")


@pytest.fixture(scope="session")
def trace_h():
    return build_hamiltonian("trace-control")


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        terminalreporter.write_line(results[k])
