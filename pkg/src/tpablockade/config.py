"""Experiment configuration files.

The format is INI as read by :mod:`configparser`: ``[section]`` headers and
``key = value`` lines, ``#`` or ``;`` comments. Sections:

``[params]``
    ``delta_a``, ``g``, ``theta0``, ``omega``, ``kappa``, ``kappa2``. ``g`` and
    ``theta0`` also accept ``optimal``, resolved to the weak-drive blockade
    optimum at the given ``delta_a``, ``omega`` and ``kappa``.
``[space]``
    ``dim`` (Fock dimension, default 16).
``[solver]``
    ``residual_tol``, ``ode_rel_tol``, ``ode_abs_tol``, ``max_steps``.

and exactly one task section:

``[steady]``
    no keys.
``[sweep]``
    ``orders`` (comma list, default ``2, 3, 4``), ``threshold`` (0.1), plus
    one ``[axis.<name>]`` section per axis in sweep order with optional
    ``start``, ``stop``, ``steps``, ``spacing`` (defaults from
    :func:`tpablockade.sweep.default_axis`).
``[g2tau]``
    ``tau_max`` (20), ``steps`` (201); the delay grid is
    ``linspace(0, tau_max, steps)``.
``[validate]``
    ``delta_min`` (0.5), ``delta_max`` (1.5), ``steps`` (101), ``rel_tol``
    (0.05), ``floor`` (1e-3).
``[fockpop]``
    ``delta_min`` (0), ``delta_max`` (2), ``steps`` (101), ``levels`` (6).

Unknown sections or keys are rejected. Overrides use dotted paths such as
``params.kappa2`` or ``axis.g.steps``.
"""

import configparser
import hashlib
import math
from dataclasses import dataclass, field

from .errors import ParseError, ValidationError
from .ops import FockSpace, SystemParams
from .analytics import optimal_conditions
from .solvers import SolverConfig
from .sweep import AXIS_NAMES, SweepAxis, SweepSpec, default_axis

TASKS = ("steady", "sweep", "g2tau", "validate", "fockpop")

PARAM_KEYS = ("delta_a", "g", "theta0", "omega", "kappa", "kappa2")
SOLVER_KEYS = ("residual_tol", "ode_rel_tol", "ode_abs_tol", "max_steps")

TASK_DEFAULTS = {
    "steady": {},
    "sweep": {"orders": (2, 3, 4), "threshold": 0.1},
    "g2tau": {"tau_max": 20.0, "steps": 201},
    "validate": {"delta_min": 0.5, "delta_max": 1.5, "steps": 101, "rel_tol": 0.05, "floor": 1e-3},
    "fockpop": {"delta_min": 0.0, "delta_max": 2.0, "steps": 101, "levels": 6},
}
INT_KEYS = {"steps", "levels", "dim", "max_steps"}
AXIS_KEYS = ("start", "stop", "steps", "spacing")


@dataclass(frozen=True)
class ExperimentConfig:
    params: SystemParams
    dim: int
    solver: SolverConfig
    task: str
    options: dict = field(default_factory=dict)
    axes: tuple = ()

    def sweep_spec(self):
        return SweepSpec(
            base=self.params,
            axes=self.axes,
            dim=self.dim,
            orders=self.options["orders"],
            threshold=self.options["threshold"],
        )

    def digest(self):
        return hashlib.sha256(serialize_config(self).encode("utf-8")).hexdigest()


def _float(raw, key):
    try:
        value = float(raw)
    except ValueError:
        raise ValidationError(f"{key}: expected a number, got {raw!r}", key) from None
    if not math.isfinite(value):
        raise ValidationError(f"{key}: value must be finite, got {raw!r}", key)
    return value


def _int(raw, key):
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(f"{key}: expected an integer, got {raw!r}", key) from None


def _value(raw, key):
    name = key.rsplit(".", 1)[-1]
    if name in INT_KEYS:
        return _int(raw, key)
    if name == "orders":
        parts = [p.strip() for p in raw.split(",") if p.strip()]
        if not parts:
            raise ValidationError(f"{key}: at least one order is required", key)
        return tuple(_int(p, key) for p in parts)
    if name == "spacing":
        return raw.strip()
    return _float(raw, key)


def _reject_unknown(section, allowed, prefix):
    for key in section:
        if key not in allowed:
            raise ValidationError(f"unknown key {prefix}.{key}", f"{prefix}.{key}")


def _read(text):
    parser = configparser.ConfigParser(interpolation=None, default_section="__defaults__")
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ParseError(str(exc)) from None
    return parser


def apply_overrides(parser, overrides):
    """Set dotted ``section.key`` entries on a raw parser."""
    for path, value in overrides.items():
        if "." not in path:
            raise ValidationError(f"override {path!r} must be a dotted section.key path", path)
        section, key = path.rsplit(".", 1)
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section, key, str(value))


def _params(parser):
    sec = parser["params"] if parser.has_section("params") else {}
    _reject_unknown(sec, PARAM_KEYS, "params")
    raw = {k: sec[k] for k in PARAM_KEYS if k in sec}
    defaults = SystemParams()
    values = {}
    for key in ("delta_a", "omega", "kappa", "kappa2"):
        values[key] = _float(raw[key], f"params.{key}") if key in raw else getattr(defaults, key)
    if values["kappa"] <= 0:
        raise ValidationError("params.kappa must be > 0", "params.kappa")
    opt = optimal_conditions(values["delta_a"], values["omega"], values["kappa"])
    for key, optimum in (("g", opt.g_opt), ("theta0", opt.theta0_opt)):
        text = raw.get(key)
        if text is None:
            values[key] = getattr(defaults, key)
        elif text.strip().lower() == "optimal":
            values[key] = optimum
        else:
            values[key] = _float(text, f"params.{key}")
    for key in ("kappa2", "omega", "g"):
        if values[key] < 0:
            raise ValidationError(f"params.{key} must be >= 0, got {values[key]}", f"params.{key}")
    return SystemParams(**values)


def _solver(parser):
    sec = parser["solver"] if parser.has_section("solver") else {}
    _reject_unknown(sec, SOLVER_KEYS, "solver")
    kwargs = {k: _value(sec[k], f"solver.{k}") for k in SOLVER_KEYS if k in sec}
    try:
        return SolverConfig(**kwargs)
    except ValueError as exc:
        key = next((f"solver.{k}" for k in kwargs if k in str(exc)), "solver")
        raise ValidationError(str(exc), key) from None


def _dim(parser):
    sec = parser["space"] if parser.has_section("space") else {}
    _reject_unknown(sec, ("dim",), "space")
    dim = _int(sec["dim"], "space.dim") if "dim" in sec else 16
    try:
        FockSpace(dim)
    except ValueError as exc:
        raise ValidationError(str(exc), "space.dim") from None
    return dim


def _axes(parser, params, axis_sections):
    axes = []
    for section in axis_sections:
        name = section.split(".", 1)[1]
        if name not in AXIS_NAMES:
            raise ValidationError(f"unknown sweep axis {name!r}", section)
        sec = parser[section]
        _reject_unknown(sec, AXIS_KEYS, section)
        given = {k: _value(sec[k], f"{section}.{k}") for k in AXIS_KEYS if k in sec}
        try:
            base = default_axis(name, params, given.get("steps"))
            axes.append(
                SweepAxis(
                    name,
                    given.get("start", base.start),
                    given.get("stop", base.stop),
                    given.get("steps", base.steps),
                    given.get("spacing", base.spacing),
                )
            )
        except ValueError as exc:
            raise ValidationError(str(exc), section) from None
    return tuple(axes)


def _check_range(opts, task):
    if not opts["delta_min"] < opts["delta_max"]:
        raise ValidationError(f"{task}.delta_min must be below {task}.delta_max", f"{task}.delta_min")
    if opts["steps"] < 2:
        raise ValidationError(f"{task}.steps must be >= 2", f"{task}.steps")


def _task_options(parser, task, dim):
    sec = parser[task]
    defaults = TASK_DEFAULTS[task]
    _reject_unknown(sec, defaults, task)
    opts = dict(defaults)
    for key in sec:
        opts[key] = _value(sec[key], f"{task}.{key}")
    if task == "sweep":
        if any(n not in (2, 3, 4) for n in opts["orders"]):
            raise ValidationError("sweep.orders must be drawn from 2, 3, 4", "sweep.orders")
        opts["orders"] = tuple(opts["orders"])
        if not 0 < opts["threshold"] < 1:
            raise ValidationError("sweep.threshold must lie in (0, 1)", "sweep.threshold")
    elif task == "g2tau":
        if not opts["tau_max"] > 0:
            raise ValidationError("g2tau.tau_max must be > 0", "g2tau.tau_max")
        if opts["steps"] < 2:
            raise ValidationError("g2tau.steps must be >= 2", "g2tau.steps")
    elif task == "validate":
        _check_range(opts, task)
        for key in ("rel_tol", "floor"):
            if not opts[key] > 0:
                raise ValidationError(f"validate.{key} must be > 0", f"validate.{key}")
    elif task == "fockpop":
        _check_range(opts, task)
        if not 1 <= opts["levels"] <= dim:
            raise ValidationError(f"fockpop.levels must lie in [1, {dim}]", "fockpop.levels")
    return opts


def parse_config(text, overrides=None):
    """Parse and validate configuration text into an :class:`ExperimentConfig`."""
    parser = _read(text)
    if overrides:
        apply_overrides(parser, overrides)

    sections = parser.sections()
    axis_sections = [s for s in sections if s.startswith("axis.")]
    known = {"params", "space", "solver", *TASKS}
    for s in sections:
        if s not in known and s not in axis_sections:
            raise ValidationError(f"unknown section [{s}]", s)
    tasks = [s for s in sections if s in TASKS]
    if len(tasks) != 1:
        found = ", ".join(tasks) or "none"
        raise ValidationError(f"exactly one task section is required (found: {found})", "task")
    task = tasks[0]
    if axis_sections and task != "sweep":
        raise ValidationError("[axis.*] sections are only valid with [sweep]", axis_sections[0])

    params = _params(parser)
    dim = _dim(parser)
    solver = _solver(parser)
    options = _task_options(parser, task, dim)
    axes = ()
    if task == "sweep":
        if not axis_sections:
            raise ValidationError("a sweep needs at least one [axis.<name>] section", "sweep")
        if len(axis_sections) > 3:
            raise ValidationError("a sweep takes at most 3 axes", "sweep")
        axes = _axes(parser, params, axis_sections)
    return ExperimentConfig(params, dim, solver, task, options, axes)


def _fmt(value):
    if isinstance(value, tuple):
        return ", ".join(_fmt(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize_config(config):
    """Render a config so that ``parse_config(serialize_config(c)) == c``."""
    lines = ["[params]"]
    lines += [f"{k} = {_fmt(getattr(config.params, k))}" for k in PARAM_KEYS]
    lines += ["", "[space]", f"dim = {config.dim}", "", "[solver]"]
    lines += [f"{k} = {_fmt(getattr(config.solver, k))}" for k in SOLVER_KEYS]
    lines += ["", f"[{config.task}]"]
    lines += [f"{k} = {_fmt(v)}" for k, v in config.options.items()]
    for ax in config.axes:
        lines += ["", f"[axis.{ax.name}]"]
        lines += [f"{k} = {_fmt(getattr(ax, k))}" for k in AXIS_KEYS]
    return "\n".join(lines) + "\n"


TEMPLATES = {
    "steady": "[steady]\n",
    "sweep": (
        "[sweep]\norders = 2, 3, 4\nthreshold = 0.1\n\n"
        "[axis.g]\nsteps = 41\n\n[axis.delta_a]\nsteps = 41\n"
    ),
    "g2tau": "[g2tau]\ntau_max = 20.0\nsteps = 201\n",
    "validate": "[validate]\ndelta_min = 0.5\ndelta_max = 1.5\nsteps = 101\nrel_tol = 0.05\nfloor = 0.001\n",
    "fockpop": "[fockpop]\ndelta_min = 0.0\ndelta_max = 2.0\nsteps = 101\nlevels = 6\n",
}


def template(task):
    """Starter config for ``task`` at the design-point parameters."""
    if task not in TASKS:
        raise ValueError(f"unknown task {task!r}; expected one of {TASKS}")
    head = (
        "[params]\ndelta_a = 1.0\ng = optimal\ntheta0 = optimal\n"
        "omega = 0.01\nkappa = 1.0\nkappa2 = 0.0\n\n[space]\ndim = 16\n\n"
    )
    return head + TEMPLATES[task]
