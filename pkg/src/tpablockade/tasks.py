"""Run a configured experiment and write its CSV / JSON outputs."""

import json
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .analytics import analytic_amplitudes, analytic_g2, analytic_mean_photon
from .errors import SolverError, ZeroOccupation
from .observables import fock_populations, g2_tau, gn_zero, mean_photon
from .ops import FockSpace
from .solvers import liouvillian, steady_state, steady_state_residual
from .sweep import SweepAxis, SweepSpec, effective_area, optimum_overlay, run_sweep

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_SOLVER = 2

# weak-drive expressions are only reported when the drive is this weak
WEAK_DRIVE_LIMIT = 0.05


@dataclass
class TaskResult:
    status: int
    files: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)


def format_number(x):
    return format(float(x), ".17g")


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(format_number(v) for v in row) + "\n")
    return path


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def write_json(path, payload):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_clean(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _params_dict(params):
    return {k: getattr(params, k) for k in ("delta_a", "g", "theta0", "omega", "kappa", "kappa2")}


def _metadata(config):
    s = config.solver
    return {
        "task": config.task,
        "dim": config.dim,
        "params": _params_dict(config.params),
        "residual_tol": s.residual_tol,
        "ode_rel_tol": s.ode_rel_tol,
        "ode_abs_tol": s.ode_abs_tol,
        "max_steps": s.max_steps,
        "config_hash": config.digest(),
        "version": __version__,
        "kernel_backend": kernels.backend(),
    }


def _safe_gn(rho, n):
    try:
        return gn_zero(rho, n)
    except ZeroOccupation:
        return None


def _analytic_report(params):
    if params.omega > WEAK_DRIVE_LIMIT * params.kappa:
        return None
    amp = analytic_amplitudes(params)
    try:
        g2 = analytic_g2(params)
    except ZeroOccupation:
        g2 = None
    return {"c1": amp.c1, "c2": amp.c2, "mean_photon": analytic_mean_photon(params), "g2": g2}


def _steady(config, out, workers):
    L = liouvillian(config.params, config.dim)
    rho = steady_state(L, config.solver)
    report = {
        "g2": _safe_gn(rho, 2),
        "g3": _safe_gn(rho, 3),
        "g4": _safe_gn(rho, 4),
        "mean_photon": mean_photon(rho),
        "fock_populations": list(fock_populations(rho)),
        "residual": steady_state_residual(L, rho),
        "analytic": _analytic_report(config.params),
        "metadata": _metadata(config),
    }
    return TaskResult(EXIT_OK, [write_json(out / "steady.json", report)], report)


def _sweep(config, out, workers):
    spec = config.sweep_spec()
    result = run_sweep(spec, config.solver, workers=workers)
    header = [ax.name for ax in spec.axes] + [f"g{n}" for n in spec.orders] + ["n_mean", "residual"]
    rows = (
        list(result.points[i])
        + [result.values[n][i] for n in spec.orders]
        + [result.mean_photon[i], result.residual[i]]
        for i in range(len(result))
    )
    files = [write_csv(out / "sweep.csv", header, rows)]

    meta = _metadata(config)
    meta.update(result.metadata)
    meta["axes"] = [
        {"name": ax.name, "start": ax.start, "stop": ax.stop, "steps": ax.steps, "spacing": ax.spacing}
        for ax in spec.axes
    ]
    meta["orders"] = list(spec.orders)
    meta["threshold"] = spec.threshold
    meta["warnings"] = len(result.errors)
    meta["failed"] = {str(i): msg for i, msg in sorted(result.errors.items())}
    if len(spec.axes) == 2:
        meta["effective_area"] = {f"g{n}": effective_area(result, n) for n in spec.orders}
    if "delta_a" in [ax.name for ax in spec.axes]:
        overlay = optimum_overlay(spec)
        files.append(write_csv(out / "sweep_optimum.csv", ["delta_a", "g_opt", "theta0_opt"], overlay))
    files.append(write_json(out / "sweep.json", meta))
    return TaskResult(EXIT_OK, files, meta)


def _g2tau(config, out, workers):
    opts = config.options
    tau = np.linspace(0.0, opts["tau_max"], opts["steps"])
    g2 = g2_tau(config.params, config.dim, tau, config.solver)
    files = [write_csv(out / "g2tau.csv", ["tau", "g2_tau"], zip(tau, g2))]
    meta = _metadata(config)
    meta.update({"tau_max": opts["tau_max"], "steps": opts["steps"], "g2_final": g2[-1]})
    files.append(write_json(out / "g2tau.json", meta))
    return TaskResult(EXIT_OK, files, meta)


def _validate(config, out, workers):
    opts = config.options
    axis = SweepAxis("delta_a", opts["delta_min"], opts["delta_max"], opts["steps"])
    spec = SweepSpec(config.params, (axis,), dim=config.dim, orders=(2,))
    result = run_sweep(spec, config.solver, workers=workers)
    deltas = axis.values()
    numeric = result.values[2]
    analytic = np.array([analytic_g2(config.params.replace(delta_a=d)) for d in deltas])
    diff = np.abs(numeric - analytic)
    mask = analytic > opts["floor"]
    rel = diff[mask] / analytic[mask]
    max_rel = float(np.max(rel)) if rel.size else 0.0
    agree = bool(max_rel <= opts["rel_tol"] and not np.any(np.isnan(numeric)))
    files = [
        write_csv(
            out / "validate.csv",
            ["delta_a", "g2_analytic", "g2_numeric", "abs_diff"],
            zip(deltas, analytic, numeric, diff),
        )
    ]
    meta = _metadata(config)
    meta.update(
        {
            "max_abs_diff": float(np.nanmax(diff)),
            "max_rel_diff_above_floor": max_rel,
            "points_above_floor": int(mask.sum()),
            "floor": opts["floor"],
            "rel_tol": opts["rel_tol"],
            "numeric_argmin_delta_a": float(deltas[np.nanargmin(numeric)]),
            "analytic_argmin_delta_a": float(deltas[np.argmin(analytic)]),
            "agree": agree,
            "warnings": len(result.errors),
        }
    )
    files.append(write_json(out / "validate.json", meta))
    if not agree:
        log.error(
            "analytic and numeric g2(0) differ by up to %.3g relative (tolerance %.3g)",
            max_rel,
            opts["rel_tol"],
        )
    return TaskResult(EXIT_OK if agree else EXIT_INVALID, files, meta)


def _fockpop(config, out, workers):
    opts = config.options
    levels = opts["levels"]
    space = FockSpace(config.dim)
    rows = []
    for d in np.linspace(opts["delta_min"], opts["delta_max"], opts["steps"]):
        rho = steady_state(liouvillian(config.params.replace(delta_a=float(d)), space), config.solver)
        rows.append([d, *fock_populations(rho)[:levels]])
    header = ["delta_a"] + [f"P{k}" for k in range(levels)]
    return TaskResult(EXIT_OK, [write_csv(out / "fockpop.csv", header, rows)], {"rows": len(rows)})


RUNNERS = {
    "steady": _steady,
    "sweep": _sweep,
    "g2tau": _g2tau,
    "validate": _validate,
    "fockpop": _fockpop,
}


def run_task(config, out_dir=".", workers=None):
    """Execute ``config`` and write its outputs into ``out_dir``.

    Solver failures are reported as status 2 instead of propagating, so the
    caller can map the result straight to an exit code.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    try:
        result = RUNNERS[config.task](config, out, workers)
    except SolverError as exc:
        log.error("%s task failed: %s: %s", config.task, type(exc).__name__, exc)
        return TaskResult(EXIT_SOLVER, [], {"error": f"{type(exc).__name__}: {exc}"})
    log.info("%s task finished in %.2fs", config.task, time.perf_counter() - t0)
    return result
