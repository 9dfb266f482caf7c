"""Lindblad superoperator, steady state and time propagation.

Density matrices and superoperators are plain complex numpy arrays. A
superoperator acting on a ``d x d`` density matrix is ``d^2 x d^2`` and acts on
the column-stacked vector ``rho.reshape(-1, order="F")``.
"""

import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import kernels
from .errors import (
    InvalidDensityMatrix,
    ResidualTooLarge,
    SingularSolve,
    StepLimitExceeded,
)
from .ops import FockSpace, collapse_operators, hamiltonian

log = logging.getLogger(__name__)

TRACE_DRIFT_LIMIT = 1e-8


@dataclass(frozen=True)
class SolverConfig:
    residual_tol: float = 1e-10
    ode_rel_tol: float = 1e-9
    ode_abs_tol: float = 1e-12
    max_steps: int = 500_000

    def __post_init__(self):
        for name in ("residual_tol", "ode_rel_tol", "ode_abs_tol"):
            value = float(getattr(self, name))
            if not value > 0 or not math.isfinite(value):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")
            object.__setattr__(self, name, value)
        if int(self.max_steps) != self.max_steps or self.max_steps <= 0:
            raise ValueError(f"max_steps must be a positive integer, got {self.max_steps!r}")
        object.__setattr__(self, "max_steps", int(self.max_steps))


def vec(rho):
    return np.asarray(rho, dtype=np.complex128).reshape(-1, order="F")


def unvec(v, dim=None):
    if dim is None:
        dim = math.isqrt(v.shape[0])
    return np.asarray(v).reshape(dim, dim, order="F")


def check_density_matrix(rho, herm_tol=1e-12, trace_tol=1e-10, psd_tol=1e-10):
    """Raise :class:`InvalidDensityMatrix` unless ``rho`` is a valid state."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidDensityMatrix(f"expected a square matrix, got shape {rho.shape}")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm >= herm_tol:
        raise InvalidDensityMatrix(f"not Hermitian (max |rho - rho^dag| = {herm:.3g})")
    tr = np.trace(rho)
    if abs(tr - 1.0) >= trace_tol:
        raise InvalidDensityMatrix(f"trace is {tr:.15g}, expected 1")
    lowest = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]
    if lowest < -psd_tol:
        raise InvalidDensityMatrix(f"smallest eigenvalue {lowest:.3g} is negative")
    return rho


def liouvillian(params, space):
    """Lindblad generator with cavity loss ``kappa`` and two-photon loss ``kappa2``."""
    if not isinstance(space, FockSpace):
        space = FockSpace(space)
    H = hamiltonian(params, space)
    return kernels.assemble_liouvillian(H, collapse_operators(params, space))


def _finalize(x, dim):
    rho = unvec(x, dim)
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def _steady_state_eig(L, dim, tol):
    vals, vecs = scipy.linalg.eig(L)
    order = np.argsort(np.abs(vals))
    if np.abs(vals[order[1]]) < tol:
        raise SingularSolve(
            "Liouvillian has more than one (near-)zero eigenvalue; steady state is not unique"
        )
    x = vecs[:, order[0]]
    tr = x[:: dim + 1].sum()
    if abs(tr) < 1e-12 * np.linalg.norm(x):
        raise SingularSolve("null vector of the Liouvillian has zero trace")
    return _finalize(x / tr, dim)


def steady_state(L, cfg=None):
    """Unique stationary density matrix of the superoperator ``L``.

    One row of ``L`` is swapped for the trace functional and the system is
    solved by LU with partial pivoting. If the factorization is singular the
    eigenvector of the smallest-magnitude eigenvalue is used instead. The
    residual ``||L vec(rho)||_2`` is always checked against the unmodified
    ``L``.
    """
    cfg = cfg or SolverConfig()
    L = np.asarray(L, dtype=np.complex128)
    n = L.shape[0]
    dim = math.isqrt(n)
    if dim * dim != n or L.shape != (n, n):
        raise ValueError(f"superoperator must be square with a square dimension, got {L.shape}")

    diag_idx = np.arange(dim) * (dim + 1)
    M = L.copy()
    M[0, :] = 0.0
    M[0, diag_idx] = 1.0
    rhs = np.zeros(n, dtype=np.complex128)
    rhs[0] = 1.0

    with warnings.catch_warnings():
        # singular factors are detected from the pivots below
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(M, check_finite=True)
    pivots = np.abs(np.diag(lu))
    if pivots.min() <= n * np.finfo(float).eps * pivots.max():
        log.debug("trace-constrained LU is singular, falling back to eigen-decomposition")
        rho = _steady_state_eig(L, dim, cfg.residual_tol)
    else:
        rho = _finalize(scipy.linalg.lu_solve((lu, piv), rhs), dim)

    residual = np.linalg.norm(L @ vec(rho))
    if not residual < cfg.residual_tol:
        raise ResidualTooLarge(f"steady-state residual {residual:.3g} exceeds {cfg.residual_tol:.3g}")
    try:
        check_density_matrix(rho)
    except InvalidDensityMatrix as exc:
        raise SingularSolve(f"steady state is not a valid density matrix: {exc}") from exc
    return rho


def steady_state_residual(L, rho):
    return float(np.linalg.norm(np.asarray(L) @ vec(rho)))


def _check_grid(t_grid):
    t = np.asarray(t_grid, dtype=np.float64)
    if t.ndim != 1 or t.size == 0:
        raise ValueError("time grid must be a non-empty 1-D sequence")
    if t[0] < 0:
        raise ValueError("time grid must start at t >= 0")
    if np.any(np.diff(t) <= 0):
        raise ValueError("time grid must be strictly ascending")
    return t


def propagate(x0, L, t_grid, cfg=None):
    """Raw propagation of any operator under ``L`` (no renormalization).

    ``x0`` is a ``d x d`` matrix; the result has shape ``(len(t_grid), d, d)``.
    """
    cfg = cfg or SolverConfig()
    t = _check_grid(t_grid)
    x0 = np.asarray(x0, dtype=np.complex128)
    dim = x0.shape[0]
    samples, steps, completed = kernels.dopri5(
        L, vec(x0), t, cfg.ode_rel_tol, cfg.ode_abs_tol, cfg.max_steps
    )
    if not completed:
        raise StepLimitExceeded(f"integrator took {steps} steps without reaching t={t[-1]:g}")
    return samples.reshape(len(t), dim, dim).transpose(0, 2, 1)


def evolve(rho0, L, t_grid, cfg=None):
    """Density matrices at each time in ``t_grid`` starting from ``rho0`` at ``t_grid[0]``.

    Each output is Hermitized and trace-renormalized; a trace drift above
    ``TRACE_DRIFT_LIMIT`` before renormalization is logged as a warning.
    """
    check_density_matrix(rho0)
    raw = propagate(rho0, L, t_grid, cfg)
    out = []
    for k, rho in enumerate(raw):
        drift = abs(np.trace(rho) - 1.0)
        if drift > TRACE_DRIFT_LIMIT:
            log.warning("trace drift %.3g at sample %d exceeds %.1g", drift, k, TRACE_DRIFT_LIMIT)
        rho = 0.5 * (rho + rho.conj().T)
        out.append(rho / np.trace(rho).real)
    return out
