"""Truncated Fock-space operators and the cavity-OPA Hamiltonians.

The lab-frame model is

    H0 = w_a a^dag a + i g (e^{i theta} a^dag^2 - e^{-i theta} a^2)
         + Omega (a^dag e^{i w_l t} + a e^{-i w_l t}),    theta = theta0 + w_p t.

With the pump locked at ``w_p = 2 w_a`` and a frame rotating at the drive
frequency, only ``delta_a = w_a - w_l`` and ``theta0`` survive, which is what
:func:`hamiltonian` builds. All rates are in units of ``kappa``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .analytics import optimal_conditions


def _wrap_phase(theta):
    """Map a phase into (-pi, pi]."""
    wrapped = math.remainder(theta, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters of the driven cavity with OPA and two-photon loss.

    Attributes:
        delta_a: cavity-drive detuning.
        g: OPA nonlinear gain.
        theta0: pump phase in radians, normalized into (-pi, pi].
        omega: drive amplitude.
        kappa: single-photon decay rate (reference unit).
        kappa2: two-photon absorption rate.
    """

    delta_a: float = 1.0
    g: float = 0.0
    theta0: float = 0.0
    omega: float = 0.0
    kappa: float = 1.0
    kappa2: float = 0.0

    def __post_init__(self):
        for name in ("delta_a", "g", "theta0", "omega", "kappa", "kappa2"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.kappa <= 0:
            raise ValueError(f"kappa must be > 0, got {self.kappa}")
        for name in ("kappa2", "omega", "g"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")
        object.__setattr__(self, "theta0", _wrap_phase(self.theta0))

    def replace(self, **changes):
        fields = {k: getattr(self, k) for k in ("delta_a", "g", "theta0", "omega", "kappa", "kappa2")}
        fields.update(changes)
        return SystemParams(**fields)

    @classmethod
    def optimal(cls, delta_a=1.0, omega=0.01, kappa=1.0, kappa2=0.0):
        """Parameters on the weak-drive blockade optimum for ``delta_a``."""
        opt = optimal_conditions(delta_a, omega, kappa)
        return cls(delta_a=delta_a, g=opt.g_opt, theta0=opt.theta0_opt, omega=omega, kappa=kappa, kappa2=kappa2)


@dataclass(frozen=True)
class FockSpace:
    """Truncated single-mode Fock space with levels ``0 .. dim-1``."""

    dim: int = 16

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 3:
            raise ValueError(f"Fock dimension must be an integer >= 3, got {self.dim!r}")
        object.__setattr__(self, "dim", int(self.dim))


def _dim(space):
    dim = space.dim if isinstance(space, FockSpace) else int(space)
    if dim < 1:
        raise ValueError(f"dimension must be positive, got {dim}")
    return dim


def annihilation(space):
    """Lowering operator with ``<n-1|a|n> = sqrt(n)``.

    ``space`` may be a :class:`FockSpace` or a plain integer dimension.
    """
    dim = _dim(space)
    return np.diag(np.sqrt(np.arange(1, dim, dtype=np.float64)), 1).astype(np.complex128)


def number(space):
    dim = _dim(space)
    return np.diag(np.arange(dim, dtype=np.float64)).astype(np.complex128)


def hamiltonian(params, space):
    """Rotating-frame Hamiltonian, Hermitian by construction."""
    a = annihilation(space)
    ad = a.conj().T
    a2 = a @ a
    phase = np.exp(1j * params.theta0)
    pump = 1j * params.g * (phase * (ad @ ad) - np.conj(phase) * a2)
    # number term from integers so diag(H) is exact
    return params.delta_a * number(space) + pump + params.omega * (ad + a)


def effective_hamiltonian(params, space):
    """Non-Hermitian ``H - i kappa/2 n - i kappa2/2 a^dag^2 a^2``.

    The loss part is diagonal: ``-i (kappa n + kappa2 n (n-1)) / 2`` at level n.
    """
    dim = _dim(space)
    n = np.arange(dim, dtype=np.float64)
    loss = 0.5 * (params.kappa * n + params.kappa2 * n * (n - 1.0))
    return hamiltonian(params, dim) - 1j * np.diag(loss)


def collapse_operators(params, space):
    """Rate-scaled jump operators ``sqrt(kappa) a`` and ``sqrt(kappa2) a^2``.

    The two-photon channel is omitted when ``kappa2 == 0``.
    """
    a = annihilation(space)
    ops = [math.sqrt(params.kappa) * a]
    if params.kappa2 > 0:
        ops.append(math.sqrt(params.kappa2) * (a @ a))
    return np.stack(ops)
