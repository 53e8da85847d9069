"""Command-line interface: simulate, scenario, bounds, validate.

Exit codes: 0 success, 2 usage error, 3 degenerate result (e.g. every trial
truncated), 4 validation failure.  CSV columns are fixed (see
``harness.CSV_COLUMNS``); floats carry 17 significant digits, and each file
embeds its resolved configuration as a leading ``#`` comment so identical
invocations produce identical bytes.

A flat INI config file may supply defaults per subcommand; explicit flags
override it::

    [simulate]
    n = 262144
    mu = 2.0
    target = ball
    size = 8
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys

from . import bounds as bounds_mod
from . import harness, validate
from .errors import DiagnosticError, InvalidInputError
from .geometry import Target

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DEGENERATE = 3
EXIT_VALIDATION = 4


def _parse_size(text: str):
    try:
        parts = [float(p) for p in str(text).split(",") if p != ""]
    except ValueError:
        raise InvalidInputError(f"cannot parse --size {text!r}") from None
    if not 1 <= len(parts) <= 2:
        raise InvalidInputError(f"--size expects 1 or 2 comma-separated numbers, got {text!r}")
    return parts


def build_target(kind: str, size: str, d: float) -> Target:
    parts = _parse_size(size)
    if kind == "ball":
        return Target.ball(parts[0], d)
    if kind == "disc":
        return Target.disc(parts[0], d)
    if kind == "line":
        return Target.line(parts[0], d)
    if kind == "rect":
        if len(parts) != 2:
            raise InvalidInputError("rect targets need --size a,b")
        return Target.rect(parts[0], parts[1], d)
    raise InvalidInputError(f"unknown target kind {kind!r}")


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="levy3d", description=__doc__,
                                  formatter_class=argparse.RawDescriptionHelpFormatter)
    top.add_argument("--config", help="INI file with per-subcommand defaults")
    sub = top.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one (target, mu, n) batch, emit a CSV row")
    sim.add_argument("--n", type=float, help="torus volume")
    sim.add_argument("--mu", type=float, help="Levy exponent in (1, 3]")
    sim.add_argument("--target", choices=["ball", "disc", "line", "rect"])
    sim.add_argument("--size", help="shape parameters, e.g. 8 or 10,6")
    sim.add_argument("--d", type=float, help="detection radius (default 1)")
    sim.add_argument("--trials", type=int, help="number of trials (default 200)")
    sim.add_argument("--seed", type=int, help="master seed (default 0)")
    sim.add_argument("--step-cap", type=int, dest="step_cap")
    sim.add_argument("--out", help="output CSV path (default stdout)")

    sc = sub.add_parser("scenario", help="run a named scenario preset")
    sc.add_argument("name", nargs="?", help="scenario name")
    sc.add_argument("--n", type=float)
    sc.add_argument("--trials", type=int)
    sc.add_argument("--seed", type=int)
    sc.add_argument("--step-cap", type=int, dest="step_cap")
    sc.add_argument("--d", type=float)
    sc.add_argument("--out", help="output CSV path (default stdout)")

    bd = sub.add_parser("bounds", help="evaluate the closed-form bounds, emit JSON")
    bd.add_argument("--target", choices=["ball", "disc", "line", "rect"])
    bd.add_argument("--size")
    bd.add_argument("--d", type=float)
    bd.add_argument("--mu", type=float)
    bd.add_argument("--n", type=float)
    bd.add_argument("--out", help="output JSON path (default stdout)")

    va = sub.add_parser("validate", help="run the self-validation suite")
    va.add_argument("level", nargs="?", choices=["quick", "full"])
    return top


_DEFAULTS = {
    "simulate": {"d": 1.0, "trials": 200, "seed": 0,
                 "step_cap": harness.DEFAULT_STEP_CAP},
    "scenario": {"n": float(harness.DEFAULT_N), "seed": harness.DEFAULT_SEED,
                 "step_cap": harness.DEFAULT_STEP_CAP, "d": 1.0},
    "bounds": {"d": 1.0},
    "validate": {"level": "quick"},
}

_TYPES = {"n": float, "mu": float, "d": float, "trials": int, "seed": int,
          "step_cap": int, "target": str, "size": str, "out": str,
          "name": str, "level": str}


def _apply_config(args: argparse.Namespace) -> None:
    """Fill unset options from the config file, then from built-in defaults."""
    file_vals = {}
    if args.config:
        cp = configparser.ConfigParser()
        read = cp.read(args.config)
        if not read:
            raise InvalidInputError(f"config file {args.config!r} not readable")
        if cp.has_section(args.command):
            for key, raw in cp.items(args.command):
                key = key.replace("-", "_")
                if key not in _TYPES:
                    raise InvalidInputError(f"unknown config key {key!r}")
                file_vals[key] = _TYPES[key](raw)
    for source in (file_vals, _DEFAULTS.get(args.command, {})):
        for key, val in source.items():
            if getattr(args, key, None) is None:
                setattr(args, key, val)


def _require(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise InvalidInputError(
            f"missing required option(s): {', '.join('--' + m.replace('_', '-') for m in missing)}")


def _emit(text: str, out_path) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_simulate(args) -> int:
    _require(args, "n", "mu", "target", "size")
    target = build_target(args.target, args.size, args.d)
    spec = harness.SweepSpec(name="simulate", n=args.n, mu_values=(args.mu,),
                             targets=(target,), trials=args.trials,
                             master_seed=args.seed, step_cap=args.step_cap)
    records = harness.join_bounds(harness.run_sweep(spec))
    if records[0].truncated_frac == 1.0:
        sys.stderr.write("error: every trial hit the step cap; raise --step-cap\n")
        return EXIT_DEGENERATE
    provenance = {"command": "simulate", "n": args.n, "mu": args.mu,
                  "target": args.target, "size": args.size, "d": args.d,
                  "trials": args.trials, "seed": args.seed,
                  "step_cap": args.step_cap}
    _emit(harness.records_to_csv(records, provenance), args.out)
    return EXIT_OK


def _cmd_scenario(args) -> int:
    lib = harness.scenario_library(n=args.n, trials=args.trials,
                                   master_seed=args.seed, step_cap=args.step_cap,
                                   d=args.d)
    if args.name not in lib:
        sys.stderr.write(
            f"error: unknown scenario {args.name!r}; valid names: "
            + ", ".join(sorted(lib)) + "\n")
        return EXIT_USAGE
    spec = lib[args.name]
    records = harness.join_bounds(harness.run_sweep(spec))
    provenance = {"command": "scenario", "name": args.name, "n": spec.n,
                  "trials": spec.trials, "seed": spec.master_seed,
                  "step_cap": spec.step_cap, "d": args.d}
    _emit(harness.records_to_csv(records, provenance), args.out)
    return EXIT_OK


def _cmd_bounds(args) -> int:
    _require(args, "target", "size", "mu", "n")
    target = build_target(args.target, args.size, args.d)
    report = bounds_mod.evaluate(target, args.mu, args.n)
    _emit(json.dumps(report.as_dict(), indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_OK


def _cmd_validate(args) -> int:
    results = validate.run(args.level)
    failures = 0
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        failures += not res.passed
        print(f"{status} {res.name}: {res.detail}")
    print(f"{len(results) - failures}/{len(results)} checks passed ({args.level})")
    return EXIT_OK if failures == 0 else EXIT_VALIDATION


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        if args.command == "scenario" and args.name is None:
            raise InvalidInputError("scenario needs a name (flag or config)")
        handler = {"simulate": _cmd_simulate, "scenario": _cmd_scenario,
                   "bounds": _cmd_bounds, "validate": _cmd_validate}[args.command]
        return handler(args)
    except InvalidInputError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except DiagnosticError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
