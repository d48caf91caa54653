import numpy as np
import pytest

from spinsep import SpinSystem, build
from spinsep.kernels import BACKENDS

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def paper_system():
    return SpinSystem.uniform(3, 10.0, 1.0)


@pytest.fixture(scope="session")
def paper_h(paper_system):
    return build(paper_system)


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


def kron_hamiltonian(system):
    """Reference H from explicit Kronecker products of single-spin operators.

    Single-spin basis is (up, down); spin 1 is the last (fastest) factor.
    """
    iz = np.diag([0.5, -0.5])
    ip = np.array([[0.0, 1.0], [0.0, 0.0]])
    im = ip.T
    eye = np.eye(2)
    n = system.n

    def op(single, i):
        out = np.ones((1, 1))
        for s in range(n, 0, -1):
            out = np.kron(out, single if s == i else eye)
        return out

    h = system.omega * sum(op(iz, i) for i in range(1, n + 1))
    for (i, j), a in system.couplings.items():
        h = h + a * (op(iz, i) @ op(iz, j)
                     - 0.25 * (op(ip, i) @ op(im, j) + op(im, i) @ op(ip, j)))
        if system.include_p:
            h = h + a * (op(ip, i) @ op(ip, j) + op(im, i) @ op(im, j))
    return h


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
