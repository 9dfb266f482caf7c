"""Closed-form weak-drive solution on the three-level space |0>, |1>, |2>.

With ``C0 ~ 1`` and stationary amplitudes, the effective non-Hermitian
Schrodinger equation reduces to a 2x2 linear system for ``C1`` and ``C2``:

    (delta - i kappa/2) C1 + sqrt(2) Omega C2                  = -Omega
    sqrt(2) C1 + (2 delta - i kappa - i kappa2) C2  = -i sqrt(2) g e^{i theta0}

This module never touches the numerical solvers; it is the independent
reference that the full master-equation results are checked against.

The blockade optimum (``C2 = 0``) does not depend on ``kappa2``: two-photon
absorption changes how fast ``|C2|`` grows away from the optimum, not where
the optimum sits.
"""

import cmath
import math
from dataclasses import dataclass

from .errors import DegenerateDenominator, ZeroOccupation

DENOMINATOR_FLOOR = 1e-14


@dataclass(frozen=True)
class AnalyticAmplitudes:
    c1: complex
    c2: complex


@dataclass(frozen=True)
class OptimalConditions:
    g_opt: float
    theta0_opt: float


def amplitudes(delta_a, g, theta0, omega, kappa, kappa2):
    """Evaluate ``(C1, C2)`` from raw numbers, with no parameter validation.

    Exposed separately from :func:`analytic_amplitudes` so that formal
    manipulations (e.g. a negative gain) can be evaluated.
    """
    denom = (delta_a - 0.5j * kappa) * (2.0 * delta_a - 1j * (kappa + kappa2)) - 2.0 * omega**2
    if abs(denom) < DENOMINATOR_FLOOR:
        raise DegenerateDenominator(f"|D| = {abs(denom):.3g} is below {DENOMINATOR_FLOOR:g}")
    pump = g * cmath.exp(1j * theta0)
    c1 = omega * (-2.0 * delta_a + 1j * (2.0 * pump + kappa + kappa2)) / denom
    c2 = math.sqrt(2.0) * (pump * (-1j * delta_a - 0.5 * kappa) + omega**2) / denom
    return c1, c2


def analytic_amplitudes(params):
    c1, c2 = amplitudes(params.delta_a, params.g, params.theta0, params.omega, params.kappa, params.kappa2)
    return AnalyticAmplitudes(c1=c1, c2=c2)


def optimal_conditions(delta_a, omega, kappa=1.0):
    """Gain and pump phase that null ``C2``.

    g_opt = Omega^2 / sqrt(delta^2 + kappa^2/4),  theta0_opt = -atan(2 delta / kappa)
    """
    if kappa <= 0:
        raise ValueError(f"kappa must be > 0, got {kappa}")
    return OptimalConditions(
        g_opt=omega**2 / math.hypot(delta_a, 0.5 * kappa),
        theta0_opt=-math.atan(2.0 * delta_a / kappa),
    )


def analytic_mean_photon(params):
    amp = analytic_amplitudes(params)
    return abs(amp.c1) ** 2 + 2.0 * abs(amp.c2) ** 2


def analytic_g2(params):
    amp = analytic_amplitudes(params)
    n = abs(amp.c1) ** 2 + 2.0 * abs(amp.c2) ** 2
    if n * n == 0.0:
        raise ZeroOccupation(f"weak-drive mean photon number {n:.3g} is zero or underflows")
    return 2.0 * abs(amp.c2) ** 2 / n**2
