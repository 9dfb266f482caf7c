"""Photon-statistics observables of a cavity state."""

from dataclasses import dataclass

import numpy as np

from .errors import NegativeExpectation, ZeroOccupation
from .ops import FockSpace, annihilation
from .solvers import SolverConfig, liouvillian, propagate, steady_state

SUPPORTED_ORDERS = (2, 3, 4)
NEGATIVE_CLAMP = 1e-12
OCCUPATION_FLOOR = 1e-300


@dataclass(frozen=True)
class CorrelatorRequest:
    orders: tuple = SUPPORTED_ORDERS
    tau_grid: tuple = None

    def __post_init__(self):
        orders = tuple(int(n) for n in self.orders)
        if not orders:
            raise ValueError("at least one correlator order is required")
        bad = [n for n in orders if n not in SUPPORTED_ORDERS]
        if bad:
            raise ValueError(f"unsupported correlator orders {bad}; allowed {SUPPORTED_ORDERS}")
        object.__setattr__(self, "orders", orders)
        if self.tau_grid is not None:
            tau = tuple(float(x) for x in self.tau_grid)
            if not tau or tau[0] != 0.0:
                raise ValueError("tau grid must start at 0")
            if any(b <= a for a, b in zip(tau, tau[1:])):
                raise ValueError("tau grid must be strictly ascending")
            object.__setattr__(self, "tau_grid", tau)


def _expect(op, rho):
    # Tr(op rho) without forming the product
    return np.einsum("ij,ji->", op, rho)


def mean_photon(rho, a=None):
    rho = np.asarray(rho)
    if a is None:
        a = annihilation(rho.shape[0])
    return float(_expect(a.conj().T @ a, rho).real)


def gn_zero(rho, n, a=None):
    """Equal-time correlator ``Tr(rho a^dag^n a^n) / Tr(rho a^dag a)^n``."""
    rho = np.asarray(rho)
    dim = rho.shape[0]
    if n not in SUPPORTED_ORDERS:
        raise ValueError(f"order {n} not supported; allowed {SUPPORTED_ORDERS}")
    if n > dim - 1:
        raise ValueError(f"order {n} needs a Fock dimension of at least {n + 1}, got {dim}")
    if a is None:
        a = annihilation(dim)
    nbar = mean_photon(rho, a)
    if not nbar > OCCUPATION_FLOOR:
        raise ZeroOccupation(f"mean photon number {nbar:.3g} is too small to normalize by")
    an = np.linalg.matrix_power(a, n)
    moment = float(_expect(an.conj().T @ an, rho).real)
    if moment < 0:
        if moment < -NEGATIVE_CLAMP:
            raise NegativeExpectation(f"<a^dag^{n} a^{n}> = {moment:.3g} is negative")
        moment = 0.0
    return moment / nbar**n


def fock_populations(rho):
    """Diagonal ``<n|rho|n>`` with rounding-level negatives clamped to zero."""
    p = np.real(np.diagonal(np.asarray(rho))).copy()
    p[(p < 0) & (p >= -1e-10)] = 0.0
    return p


def g2_tau(params, space, tau_grid, cfg=None):
    """Delayed second-order correlator from the quantum regression theorem.

    ``a rho_ss a^dag`` is propagated under the same Liouvillian as the state;
    the returned array is ``Tr[a^dag a B(tau)] / <n>^2`` on ``tau_grid``.
    """
    cfg = cfg or SolverConfig()
    request = CorrelatorRequest(orders=(2,), tau_grid=tau_grid)
    if not isinstance(space, FockSpace):
        space = FockSpace(space)
    L = liouvillian(params, space)
    rho = steady_state(L, cfg)
    a = annihilation(space)
    num = a.conj().T @ a
    nbar = mean_photon(rho, a)
    if not nbar > OCCUPATION_FLOOR:
        raise ZeroOccupation(f"mean photon number {nbar:.3g} is too small to normalize by")
    # scaling by 1/nbar keeps B(tau) at unit-trace magnitude for the
    # integrator's absolute tolerance; the map is linear so nothing else changes
    B0 = (a @ rho @ a.conj().T) / nbar
    B = propagate(B0, L, np.asarray(request.tau_grid), cfg)
    return np.array([_expect(num, b).real for b in B]) / nbar
