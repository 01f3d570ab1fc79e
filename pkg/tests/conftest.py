
import numpy as np
import pytest

SZ = np.array([[0.5, 0], [0, -0.5]], dtype=complex)
SY = np.array([[0, -0.5j], [0.5j, 0]])
I2 = np.eye(2, dtype=complex)


def site_op(op, k, L):
    """Operator on spin k; spin 0 is the rightmost Kronecker factor (LSB)."""
    out = np.eye(1, dtype=complex)
    for j in reversed(range(L)):
        out = np.kron(out, op if j == k else I2)
    return out


def kron_hamiltonian(L, J, Omega, detunings):
    """Independent construction of the rotating-frame Hamiltonian from Kronecker products."""
    H = np.zeros((2**L, 2**L), dtype=complex)
    for k in range(L):
        H += -detunings[k] * site_op(SZ, k, L) + Omega * site_op(SY, k, L)
    for k in range(L - 1):
        H += -2 * J * site_op(SZ, k, L) @ site_op(SZ, k + 1, L)
    return H


@pytest.fixture
def rng():
    return np.random.default_rng(12345)




def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import REPORT
    except ImportError:
        return
    if REPORT:
        terminalreporter.section("acceptance criteria")
        for line in REPORT:
            terminalreporter.write_line(line)
