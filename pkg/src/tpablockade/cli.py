"""Command-line entry point.

    tpablockade run CONFIG [-o OUT] [--workers N] [--section.key VALUE ...]
    tpablockade template TASK

Any ``--section.key VALUE`` (or ``--section.key=VALUE``) flag overrides the
matching config entry, e.g. ``--params.kappa2 3`` or ``--axis.g.steps 21``.
Exit status: 0 success, 1 invalid configuration or failed validation,
2 solver failure.
"""

import argparse
import logging
import sys
from pathlib import Path

from .config import TASKS, parse_config, template
from .errors import ConfigError
from .tasks import EXIT_INVALID, run_task

log = logging.getLogger("tpablockade")


def _split_overrides(extra):
    overrides = {}
    it = iter(extra)
    for tok in it:
        if not tok.startswith("--") or "." not in tok:
            raise ConfigError(f"unrecognized argument {tok!r}")
        key = tok[2:]
        if "=" in key:
            key, value = key.split("=", 1)
        else:
            value = next(it, None)
            if value is None:
                raise ConfigError(f"override {tok} needs a value")
        overrides[key] = value
    return overrides


def build_parser():
    parser = argparse.ArgumentParser(prog="tpablockade", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the task described by a config file")
    run.add_argument("config", type=Path, help="INI config file")
    run.add_argument("-o", "--out", type=Path, default=Path("."), help="output directory")
    run.add_argument(
        "--workers",
        type=int,
        default=None,
        help="sweep worker threads (default: $TPABLOCKADE_WORKERS or 1)",
    )

    tmpl = sub.add_parser("template", help="print a starter config")
    tmpl.add_argument("task", choices=TASKS)
    return parser


def main(argv=None):
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )

    if args.command == "template":
        if extra:
            parser.error(f"unrecognized arguments: {' '.join(extra)}")
        sys.stdout.write(template(args.task))
        return 0

    try:
        overrides = _split_overrides(extra)
        text = args.config.read_text(encoding="utf-8")
        config = parse_config(text, overrides)
    except (ConfigError, OSError, UnicodeDecodeError) as exc:
        log.error("%s", exc)
        return EXIT_INVALID

    result = run_task(config, args.out, workers=args.workers)
    for path in result.files:
        print(path)
    return result.status


if __name__ == "__main__":
    sys.exit(main())
