"""Parameter grids, per-point steady-state correlators and effective areas."""

import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .analytics import optimal_conditions
from .errors import AllPointsFailed, BlockadeError, WrongArity
from .observables import SUPPORTED_ORDERS, gn_zero, mean_photon
from .ops import FockSpace, SystemParams
from .solvers import SolverConfig, liouvillian, steady_state, steady_state_residual

log = logging.getLogger(__name__)

AXIS_NAMES = ("delta_a", "g", "theta0", "omega", "kappa2")
WORKERS_ENV = "TPABLOCKADE_WORKERS"


@dataclass(frozen=True)
class SweepAxis:
    name: str
    start: float
    stop: float
    steps: int
    spacing: str = "linear"

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ValueError(f"unknown sweep axis {self.name!r}; expected one of {AXIS_NAMES}")
        object.__setattr__(self, "start", float(self.start))
        object.__setattr__(self, "stop", float(self.stop))
        if int(self.steps) != self.steps or self.steps < 2:
            raise ValueError(f"axis {self.name}: steps must be an integer >= 2, got {self.steps!r}")
        object.__setattr__(self, "steps", int(self.steps))
        if not self.start < self.stop:
            raise ValueError(f"axis {self.name}: start must be below stop")
        if self.spacing not in ("linear", "log"):
            raise ValueError(f"axis {self.name}: spacing must be 'linear' or 'log'")
        if self.spacing == "log" and self.start <= 0:
            raise ValueError(f"axis {self.name}: log spacing needs start > 0")

    def values(self):
        if self.spacing == "log":
            return np.logspace(math.log10(self.start), math.log10(self.stop), self.steps)
        return np.linspace(self.start, self.stop, self.steps)

    @property
    def cell_width(self):
        """Grid spacing, in decades for log axes."""
        if self.spacing == "log":
            return (math.log10(self.stop) - math.log10(self.start)) / (self.steps - 1)
        return (self.stop - self.start) / (self.steps - 1)


def default_axis(name, base, steps=None):
    """Axis with the default reproduction range for ``name``.

    Ranges: delta_a in [0, 2]; g in [0, 3 Omega^2 / kappa]; theta0 in
    [-pi, pi]; omega in [0.001, 0.05]; kappa2 in [0, 10] with step 0.5. All
    rates scale with ``base.kappa``.
    """
    k = base.kappa
    if name == "delta_a":
        return SweepAxis(name, 0.0, 2.0 * k, steps or 41)
    if name == "g":
        return SweepAxis(name, 0.0, 3.0 * base.omega**2 / k, steps or 41)
    if name == "theta0":
        return SweepAxis(name, -math.pi, math.pi, steps or 41)
    if name == "omega":
        return SweepAxis(name, 0.001 * k, 0.05 * k, steps or 41)
    if name == "kappa2":
        return SweepAxis(name, 0.0, 10.0 * k, steps or 21)
    raise ValueError(f"unknown sweep axis {name!r}")


@dataclass(frozen=True)
class SweepSpec:
    base: SystemParams
    axes: tuple
    dim: int = 16
    orders: tuple = SUPPORTED_ORDERS
    threshold: float = 0.1

    def __post_init__(self):
        axes = tuple(self.axes)
        if not 1 <= len(axes) <= 3:
            raise ValueError(f"a sweep needs 1 to 3 axes, got {len(axes)}")
        names = [ax.name for ax in axes]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate sweep axes: {names}")
        object.__setattr__(self, "axes", axes)
        FockSpace(self.dim)
        orders = tuple(int(n) for n in self.orders)
        if not orders or any(n not in SUPPORTED_ORDERS for n in orders):
            raise ValueError(f"orders must be a non-empty subset of {SUPPORTED_ORDERS}")
        object.__setattr__(self, "orders", orders)
        if not 0 < self.threshold < 1:
            raise ValueError(f"threshold must lie in (0, 1), got {self.threshold}")

    @property
    def shape(self):
        return tuple(ax.steps for ax in self.axes)

    def points(self):
        """All grid points, last axis fastest, as an ``(N, n_axes)`` array."""
        mesh = np.meshgrid(*[ax.values() for ax in self.axes], indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def params_at(self, point):
        return self.base.replace(**{ax.name: float(v) for ax, v in zip(self.axes, point)})


@dataclass
class SweepResult:
    """Flat row-major grid of sweep outcomes.

    ``values[n]`` holds g^(n)(0) per point; failed points carry NaN in every
    result column and an entry in ``errors``.
    """

    spec: SweepSpec
    points: np.ndarray
    values: dict
    mean_photon: np.ndarray
    residual: np.ndarray
    errors: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def __len__(self):
        return self.points.shape[0]

    def grid(self, order):
        return self.values[order].reshape(self.spec.shape)

    def records(self):
        for i, point in enumerate(self.points):
            rec = {ax.name: float(v) for ax, v in zip(self.spec.axes, point)}
            for n in self.spec.orders:
                rec[f"g{n}"] = float(self.values[n][i])
            rec["n_mean"] = float(self.mean_photon[i])
            rec["residual"] = float(self.residual[i])
            yield rec


def solve_point(params, dim, orders, cfg):
    """Steady-state correlators at one parameter point.

    Returns ``(gvals, n_mean, residual)``.
    """
    L = liouvillian(params, dim)
    rho = steady_state(L, cfg)
    nbar = mean_photon(rho)
    return [gn_zero(rho, n) for n in orders], nbar, steady_state_residual(L, rho)


def _worker_count(workers):
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1") or 1)
    return max(1, int(workers))


def run_sweep(spec, cfg=None, workers=None):
    """Evaluate every grid point of ``spec``.

    Points are independent; with ``workers > 1`` they are solved on a thread
    pool, and results are written back by index so the grid never depends on
    completion order. ``workers`` defaults to ``$TPABLOCKADE_WORKERS`` or 1.
    """
    cfg = cfg or SolverConfig()
    workers = _worker_count(workers)
    points = spec.points()
    npts = points.shape[0]
    values = {n: np.full(npts, np.nan) for n in spec.orders}
    nmean = np.full(npts, np.nan)
    resid = np.full(npts, np.nan)
    errors = {}

    def task(i):
        try:
            return i, solve_point(spec.params_at(points[i]), spec.dim, spec.orders, cfg), None
        except (BlockadeError, ValueError, np.linalg.LinAlgError) as exc:
            return i, None, f"{type(exc).__name__}: {exc}"

    t0 = time.perf_counter()
    if workers == 1:
        outcomes = map(task, range(npts))
    else:
        pool = ThreadPoolExecutor(max_workers=workers)
        outcomes = pool.map(task, range(npts))
    try:
        for i, out, err in outcomes:
            if err is not None:
                errors[i] = err
                continue
            gvals, nbar, r = out
            for n, v in zip(spec.orders, gvals):
                values[n][i] = v
            nmean[i] = nbar
            resid[i] = r
    finally:
        if workers > 1:
            pool.shutdown()
    wall = time.perf_counter() - t0

    if errors and len(errors) == npts:
        first = errors[min(errors)]
        raise AllPointsFailed(f"all {npts} grid points failed; first error: {first}")
    if errors:
        log.warning("%d of %d sweep points failed", len(errors), npts)

    metadata = {
        "dim": spec.dim,
        "shape": list(spec.shape),
        "cell_widths": {ax.name: ax.cell_width for ax in spec.axes},
        "residual_tol": cfg.residual_tol,
        "ode_rel_tol": cfg.ode_rel_tol,
        "ode_abs_tol": cfg.ode_abs_tol,
        "max_steps": cfg.max_steps,
        "failed_points": len(errors),
        "workers": workers,
        "wall_time_s": wall,
        "version": __version__,
    }
    return SweepResult(spec, points, values, nmean, resid, errors, metadata)


def _cell_weights(axis):
    # midpoint cells clipped to the axis range: half cells at both ends
    w = np.full(axis.steps, axis.cell_width)
    w[0] = w[-1] = 0.5 * axis.cell_width
    return w


def effective_area(result, order, threshold=None):
    """Area of the 2-D region where g^(n)(0) falls below ``threshold``.

    Each grid point owns the cell between the midpoints to its neighbours, so
    a fully sub-threshold grid reports exactly the span of both axes. Log axes
    are measured in decades. Failed points count as above threshold.
    """
    axes = result.spec.axes
    if len(axes) != 2:
        raise WrongArity(f"effective area needs a 2-D sweep, got {len(axes)} axes")
    if order not in result.values:
        raise ValueError(f"order {order} was not computed in this sweep")
    threshold = result.spec.threshold if threshold is None else threshold
    grid = result.grid(order)
    below = np.zeros(grid.shape, dtype=bool)
    np.less(grid, threshold, out=below, where=~np.isnan(grid))
    weights = np.outer(_cell_weights(axes[0]), _cell_weights(axes[1]))
    return float(np.sum(weights[below]))


def optimum_overlay(spec):
    """``(delta_a, g_opt, theta0_opt)`` for every detuning on the sweep grid."""
    names = [ax.name for ax in spec.axes]
    if "delta_a" not in names:
        raise ValueError("optimum overlay needs a delta_a axis")
    axis = spec.axes[names.index("delta_a")]
    base = spec.base
    out = []
    for delta in axis.values():
        opt = optimal_conditions(float(delta), base.omega, base.kappa)
        out.append((float(delta), opt.g_opt, opt.theta0_opt))
    return out
