"""Command-line front end: ``bpcm {analytic,simulate,power-sweep,validate,figure}``.

Exit codes: 0 success, 1 validation failure, 2 config error, 3 numeric failure.
The environment variable ``BPCM_MAX_WORKERS`` caps Monte Carlo parallelism.
"""

import argparse
import sys
from dataclasses import replace

from .errors import ConvergenceError, DomainError, ResourceError
from .experiments import (
    ANALYTIC_HEADER,
    POWER_HEADER,
    SIMULATE_HEADER,
    ConfigError,
    bundled_config,
    cmd_analytic,
    cmd_power_sweep,
    cmd_simulate,
    cmd_validate,
    default_validate_config,
    format_checks,
    load_config,
    write_csv,
)

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


def _parser():
    p = argparse.ArgumentParser(prog="bpcm", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config_required=True):
        if config_required:
            sp.add_argument("config", help="TOML experiment config")
        else:
            sp.add_argument("config", nargs="?", help="TOML experiment config (optional)")
        sp.add_argument("-o", "--output", help="output path (default: config [output] path or stdout)")
        sp.add_argument("--seed", type=int, help="override the config seed")
        sp.add_argument("--parallelism", type=int, help="override [mc] parallelism")

    common(sub.add_parser("analytic", help="capacity functionals and MCP bounds over an r_K sweep"))
    sp = sub.add_parser("simulate", help="Monte Carlo estimates")
    common(sp)
    sp.add_argument("--dump", help="write one realization as CSV to this path")
    common(sub.add_parser("power-sweep", help="coverage of the three deployments at equal power"))
    sp = sub.add_parser("validate", help="run the analytic/Monte Carlo invariant suite")
    common(sp, config_required=False)
    sp.add_argument("--no-mc", action="store_true", help="skip the Monte Carlo agreement checks")
    sp.add_argument("--corrupt-thm4", action="store_true", help=argparse.SUPPRESS)
    sp = sub.add_parser("figure", help="regenerate a figure's data from its bundled config")
    sp.add_argument("number", type=int, choices=range(1, 6))
    sp.add_argument("-o", "--output")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--parallelism", type=int)
    return p


def _apply_overrides(cfg, args):
    mc = cfg.mc
    if getattr(args, "seed", None) is not None:
        mc = replace(mc, seed=args.seed)
    if getattr(args, "parallelism", None) is not None:
        mc = replace(mc, parallelism=args.parallelism)
    cfg.mc = mc
    return cfg


def _emit(header, rows, out):
    if out:
        write_csv(header, rows, out)
    else:
        write_csv(header, rows, sys.stdout)


def run(cfg, command, args):
    out = getattr(args, "output", None) or cfg.output
    errors = []
    if command == "analytic":
        _emit(ANALYTIC_HEADER, cmd_analytic(cfg, errors), out)
    elif command == "simulate":
        _emit(SIMULATE_HEADER, cmd_simulate(cfg, dump=getattr(args, "dump", None)), out)
    elif command == "power-sweep":
        _emit(POWER_HEADER, cmd_power_sweep(cfg, errors), out)
    elif command == "validate":
        checks = cmd_validate(
            cfg,
            corrupt_thm4=getattr(args, "corrupt_thm4", False),
            monte_carlo=not getattr(args, "no_mc", False),
        )
        report = format_checks(checks)
        if out:
            with open(out, "w") as fh:
                fh.write(report)
        sys.stdout.write(report)
        return EXIT_OK if all(c.passed for c in checks) else EXIT_VALIDATION
    else:
        raise ConfigError(f"unknown command {command!r}")
    for msg in errors:
        print(f"numeric failure: {msg}", file=sys.stderr)
    return EXIT_NUMERIC if errors else EXIT_OK


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        if args.command == "figure":
            cfg = bundled_config(args.number)
            command = cfg.command
        elif args.command == "validate" and not args.config:
            cfg = default_validate_config()
            command = "validate"
        else:
            cfg = load_config(args.config)
            command = args.command
        cfg = _apply_overrides(cfg, args)
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return run(cfg, command, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, ResourceError, DomainError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
