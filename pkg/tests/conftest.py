import numpy as np
import pytest

from tpablockade import SystemParams

ACCEPTANCE_LINES = []


def record_criterion(name, ok, detail):
    ACCEPTANCE_LINES.append(f"{name} {'PASS' if ok else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def design_params():
    """Weak-drive design point: Omega = 0.01, delta_a = 1 on the blockade optimum."""
    return SystemParams.optimal(delta_a=1.0, omega=0.01, kappa=1.0)


def random_density_matrix(rng, dim):
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = z @ z.conj().T
    return rho / np.trace(rho).real


def basis_state(dim, n):
    rho = np.zeros((dim, dim), dtype=complex)
    rho[n, n] = 1.0
    return rho
