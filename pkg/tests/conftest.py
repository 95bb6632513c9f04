import numpy as np
import pytest

from hypercycles import kernels

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(params=kernels.backends(), ids=lambda m: m.BACKEND)
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def k8_iteration():
    """One container step on K_8^(3) down to 0.8 n^2 edges, plus its C_4^(3) copies."""
    from hypercycles.containers import iterate_containers
    from hypercycles.cycles import enumerate_cycles

    fam = iterate_containers(8, 3, 2, k_target=0.8, eps=0.1, shrink=0.92)
    return fam, enumerate_cycles(fam.host, 4).masks()
