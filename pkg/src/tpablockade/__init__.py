"""Photon blockade in a driven cavity containing an optical parametric
amplifier with two-photon absorption.

Weak-drive analytics, Lindblad steady states, equal-time and delayed photon
correlators, and parameter sweeps with effective-area analysis.
"""

__version__ = "0.1.0"

from .analytics import (
    AnalyticAmplitudes,
    OptimalConditions,
    analytic_amplitudes,
    analytic_g2,
    analytic_mean_photon,
    optimal_conditions,
)
from .errors import (
    AllPointsFailed,
    BlockadeError,
    DegenerateDenominator,
    NegativeExpectation,
    ParseError,
    ResidualTooLarge,
    SingularSolve,
    StepLimitExceeded,
    ValidationError,
    WrongArity,
    ZeroOccupation,
)
from .observables import CorrelatorRequest, fock_populations, g2_tau, gn_zero, mean_photon
from .ops import (
    FockSpace,
    SystemParams,
    annihilation,
    effective_hamiltonian,
    hamiltonian,
)
from .solvers import SolverConfig, evolve, liouvillian, propagate, steady_state
from .sweep import (
    SweepAxis,
    SweepResult,
    SweepSpec,
    default_axis,
    effective_area,
    optimum_overlay,
    run_sweep,
)
