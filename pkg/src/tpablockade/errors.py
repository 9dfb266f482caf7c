"""Exception types raised by the simulation modules."""


class BlockadeError(Exception):
    """Base class for all errors raised by :mod:`tpablockade`."""


class SolverError(BlockadeError):
    """Base class for numerical solver failures (CLI exit status 2)."""


class SingularSolve(SolverError):
    """The trace-constrained steady-state system is numerically singular."""


class ResidualTooLarge(SolverError):
    """A steady state was found but ``||L rho||`` exceeds the tolerance."""


class StepLimitExceeded(SolverError):
    """The adaptive integrator hit its step cap."""


class DegenerateDenominator(BlockadeError):
    """The weak-drive amplitude denominator vanished."""


class ZeroOccupation(BlockadeError):
    """Mean photon number is zero, so normalized correlators are undefined."""


class NegativeExpectation(BlockadeError):
    """A normally ordered moment came out negative beyond rounding."""


class InvalidDensityMatrix(BlockadeError):
    """Matrix is not Hermitian, unit-trace and positive semidefinite."""


class AllPointsFailed(SolverError):
    """Every grid point of a sweep failed to solve."""


class WrongArity(BlockadeError):
    """Operation needs a sweep with a different number of axes."""


class ConfigError(BlockadeError):
    """Base class for configuration problems (CLI exit status 1)."""


class ParseError(ConfigError):
    """Malformed configuration text."""


class ValidationError(ConfigError):
    """A configuration value violates an invariant.

    ``key`` holds the dotted path of the offending entry when known.
    """

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key
