import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import basis_state, random_density_matrix
from tpablockade import (
    CorrelatorRequest,
    NegativeExpectation,
    SystemParams,
    ZeroOccupation,
    evolve,
    fock_populations,
    g2_tau,
    gn_zero,
    liouvillian,
    mean_photon,
    steady_state,
)

# P3/P2 at delta_a = 0.5 on the delta_a = 1 design point, dim 16; frozen from
# an independent prototype solve at dim 24
OFF_OPTIMUM_P3_OVER_P2 = 3.331947253270919e-4


def coherent_state(alpha, dim):
    n = np.arange(dim)
    amps = np.exp(-abs(alpha) ** 2 / 2) * alpha**n / np.sqrt([math.factorial(k) for k in n])
    psi = amps / np.linalg.norm(amps)
    return np.outer(psi, psi.conj())


@pytest.fixture(scope="module")
def design_state():
    return steady_state(liouvillian(SystemParams.optimal(), 16))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_coherent_state_is_poissonian(n):
    rho = coherent_state(0.1 * np.exp(0.3j), 16)
    assert gn_zero(rho, n) == pytest.approx(1.0, abs=1e-6)


def test_single_photon_has_no_pairs():
    assert gn_zero(basis_state(4, 1), 2) == 0.0


def test_design_point_higher_orders(design_state):
    assert gn_zero(design_state, 2) < 0.1
    assert gn_zero(design_state, 3) > 1
    assert gn_zero(design_state, 4) > 1


def test_zero_occupation():
    with pytest.raises(ZeroOccupation):
        gn_zero(basis_state(5, 0), 2)


def test_negative_expectation_detected():
    rho = basis_state(5, 1).astype(complex)
    rho[2, 2] = -1e-6
    with pytest.raises(NegativeExpectation):
        gn_zero(rho, 2)
    rho[2, 2] = -1e-14
    assert gn_zero(rho, 2) == 0.0


@pytest.mark.parametrize("n,dim", [(5, 8), (1, 8), (4, 4)])
def test_order_out_of_range(n, dim):
    with pytest.raises(ValueError):
        gn_zero(basis_state(dim, 1), n)


def test_mean_photon_examples():
    assert mean_photon(basis_state(4, 0)) == 0.0
    assert mean_photon(basis_state(4, 2)) == pytest.approx(2.0, abs=1e-15)


def test_mean_photon_linear_cavity():
    rho = steady_state(liouvillian(SystemParams(delta_a=1.0, omega=0.01), 16))
    assert mean_photon(rho) == pytest.approx(8.0e-5, abs=1e-9)


def test_fock_populations_vacuum():
    np.testing.assert_array_equal(fock_populations(basis_state(5, 0)), [1, 0, 0, 0, 0])


def test_populations_two_and_three_comparable_at_optimum(design_state):
    p = fock_populations(design_state)
    assert 0.1 < p[3] / p[2] < 10


def test_populations_three_suppressed_off_optimum():
    rho = steady_state(liouvillian(SystemParams.optimal().replace(delta_a=0.5), 16))
    p = fock_populations(rho)
    assert p[3] / p[2] == pytest.approx(OFF_OPTIMUM_P3_OVER_P2, rel=1e-6)
    assert p[3] < 1e-3 * p[2]


def test_populations_sum_along_evolution():
    p = SystemParams.optimal(kappa2=3.0).replace(omega=0.2, g=0.05)
    L = liouvillian(p, 10)
    rho0 = random_density_matrix(np.random.default_rng(2), 10)
    for rho in evolve(rho0, L, np.linspace(0, 3, 7)):
        pop = fock_populations(rho)
        assert pop.sum() == pytest.approx(1.0, abs=1e-8)
        assert np.all(pop >= 0)


@pytest.mark.parametrize("kappa2", [0.0, 1.0, 3.0, 10.0])
@pytest.mark.parametrize("delta", [0.5, 1.0, 1.5])
def test_truncation_leakage_guard(kappa2, delta):
    rho = steady_state(liouvillian(SystemParams.optimal(kappa2=kappa2).replace(delta_a=delta), 16))
    assert fock_populations(rho)[-1] < 1e-10


@settings(max_examples=40, deadline=None)
@given(phi=st.floats(-math.pi, math.pi), seed=st.integers(0, 2**16), n=st.sampled_from([2, 3, 4]))
def test_gn_phase_rotation_invariance(phi, seed, n):
    dim = 8
    rho = random_density_matrix(np.random.default_rng(seed), dim)
    U = np.diag(np.exp(-1j * phi * np.arange(dim)))
    rotated = U @ rho @ U.conj().T
    assert gn_zero(rotated, n) == pytest.approx(gn_zero(rho, n), rel=1e-12)


def test_correlator_request_validation():
    assert CorrelatorRequest(orders=[2, 4]).orders == (2, 4)
    with pytest.raises(ValueError):
        CorrelatorRequest(orders=[])
    with pytest.raises(ValueError):
        CorrelatorRequest(orders=[5])
    with pytest.raises(ValueError):
        CorrelatorRequest(tau_grid=[0.5, 1.0])
    with pytest.raises(ValueError):
        CorrelatorRequest(tau_grid=[0.0, 1.0, 1.0])


def test_g2_tau_zero_delay_matches_equal_time(design_state):
    g2 = g2_tau(SystemParams.optimal(), 16, [0.0, 0.5])
    assert g2[0] == pytest.approx(gn_zero(design_state, 2), rel=1e-10)


@pytest.mark.parametrize("kappa2", [0.0, 10.0])
def test_g2_tau_decorrelates(kappa2):
    g2 = g2_tau(SystemParams.optimal(kappa2=kappa2), 16, np.linspace(0, 20, 41))
    assert abs(g2[-1] - 1) < 1e-3


def test_g2_tau_short_delay_insensitive_to_tpa():
    tau = np.linspace(0, 2, 21)
    without = g2_tau(SystemParams.optimal(), 16, tau)
    with_tpa = g2_tau(SystemParams.optimal(kappa2=10.0), 16, tau)
    # both rise from ~0 to ~1.44 over this window
    assert np.max(np.abs(without - with_tpa)) < 1e-3


def test_g2_tau_coherent_drive_flat():
    g2 = g2_tau(SystemParams(delta_a=1.0, omega=0.01), 16, np.linspace(0, 5, 11))
    np.testing.assert_allclose(g2, 1.0, atol=1e-6)


def test_g2_tau_requires_zero_start():
    with pytest.raises(ValueError):
        g2_tau(SystemParams.optimal(), 8, [0.1, 1.0])
