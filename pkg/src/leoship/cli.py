"""
Command-line entry point.

Subcommands::

    leoship theory   [--config F] [--tau "13 dB"] ...
    leoship mc       [--config F] --mode distributional --mc-trials 1000000
    leoship sweep    --config F [--out rows.csv]
    leoship figure   fig4 [--out fig4.csv] [--engines theory]
    leoship validate [--criteria 1,2,3] [--mc-scale 0.01]

Every config key has a flag (``[link] p_bd`` becomes ``--p-bd``); flags win
over the file.  Exit codes: 0 success, 1 acceptance failure, 2 configuration
error, 3 numeric failure.
"""
from __future__ import annotations

import argparse
import sys

from . import acceptance, montecarlo, sweep
from .config import _SCHEMA, ENGINES, SweepSpec, load_config
from .errors import ConfigError, InvalidArgumentError, NumericFailure
from .model import Scenario

EXIT_OK, EXIT_CRITERION, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


def _add_scenario_flags(p: argparse.ArgumentParser, sweep_keys: bool = False):
    p.add_argument("--config", help="INI file with [constellation], [link], ... sections")
    g = p.add_argument_group("scenario overrides (values carry units, e.g. '13 dB')")
    for section, keys in _SCHEMA.items():
        if section == "sweep" and not sweep_keys:
            continue
        for key in keys:
            if section == "sweep" and key in ("mc_trials", "seed"):
                continue
            g.add_argument("--" + key.replace("_", "-"), dest=f"{section}.{key}", metavar="VALUE")


def _add_mc_flags(p: argparse.ArgumentParser):
    p.add_argument("--mc-trials", dest="sweep.mc_trials", metavar="N")
    p.add_argument("--seed", dest="sweep.seed", metavar="SEED")
    p.add_argument("--workers", type=int, default=1, help="worker processes (results do not change)")


def _overrides(args) -> dict:
    return {k: v for k, v in vars(args).items() if "." in k and v is not None}


def _scenario(args) -> Scenario:
    raw = {k: v for k, v in _overrides(args).items() if not k.startswith("sweep.")}
    loaded = load_config(args.config, raw)
    return loaded.base if isinstance(loaded, SweepSpec) else loaded


def _int_opt(args, key, default):
    text = getattr(args, key, None)
    if text is None:
        return default
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"expected an integer, got {text!r}", key) from None


def _write(rows, out, include_timing):
    if out:
        sweep.emit_csv(rows, out, include_timing)
    else:
        sys.stdout.write(sweep.format_csv(rows, include_timing))


def cmd_theory(args) -> int:
    sc = _scenario(args)
    row = sweep.evaluate_point(sc, "theory", "tau_db", sc.tau_db, capacity=not args.no_capacity)
    if not row.ok:
        print(row.diag, file=sys.stderr)
        return EXIT_NUMERIC
    _write([row], args.out, args.timing)
    return EXIT_OK


def cmd_mc(args) -> int:
    sc = _scenario(args)
    trials = _int_opt(args, "sweep.mc_trials", 10 ** 6)
    seed = _int_opt(args, "sweep.seed", 1)
    row = sweep.evaluate_point(sc, "mc_" + args.mode, "tau_db", sc.tau_db, trials, seed,
                               workers=args.workers)
    if not row.ok:
        print(row.diag, file=sys.stderr)
        return EXIT_NUMERIC
    _write([row], args.out, args.timing)
    return EXIT_OK


def cmd_sweep(args) -> int:
    loaded = load_config(args.config, _overrides(args))
    if not isinstance(loaded, SweepSpec):
        raise ConfigError("no [sweep] section; give --axis and --values or a [sweep] section",
                          "sweep")
    rows = sweep.run_sweep(loaded, args.workers)
    _write(rows, args.out, args.timing)
    return EXIT_NUMERIC if any(not r.ok for r in rows) else EXIT_OK


def cmd_figure(args) -> int:
    engines = tuple(e.strip() for e in args.engines.split(",") if e.strip())
    bad = [e for e in engines if e not in ENGINES]
    if bad:
        raise ConfigError(f"unknown engine(s) {bad}; expected {ENGINES}", "sweep.engines")
    base = _scenario(args)
    preset = sweep.figure_preset(args.id, engines, _int_opt(args, "sweep.mc_trials", 100_000),
                                 _int_opt(args, "sweep.seed", 1), base)
    rows = []
    for spec in preset.specs:
        rows.extend(sweep.run_sweep(spec, args.workers))
    _write(rows, args.out, args.timing)
    return EXIT_NUMERIC if any(not r.ok for r in rows) else EXIT_OK


def cmd_validate(args) -> int:
    base = _scenario(args)
    ids = [c.strip() for c in args.criteria.split(",")] if args.criteria else None
    unknown = [c for c in ids or [] if c not in acceptance.CHECKS]
    if unknown:
        raise ConfigError(f"unknown criteria {unknown}", "criteria")
    results = acceptance.run_all(base, ids, args.mc_scale, _int_opt(args, "sweep.seed", 1),
                                 echo=lambda c: print(c.line(), flush=True))
    counts = {s: sum(c.status == s for c in results) for s in ("pass", "fail", "inconclusive")}
    print(f"{counts['pass']} passed, {counts['fail']} failed, {counts['inconclusive']} inconclusive")
    return EXIT_CRITERION if counts["fail"] else EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="leoship", description=__doc__.split("\n\n")[0].strip())
    sub = parser.add_subparsers(dest="command", required=True)

    def output_flags(p):
        p.add_argument("--out", help="CSV path (default: stdout)")
        p.add_argument("--timing", action="store_true", help="fill the elapsed_ms column")

    p = sub.add_parser("theory", help="evaluate the analytical model at one scenario")
    _add_scenario_flags(p)
    p.add_argument("--no-capacity", action="store_true", help="skip the rate integrals")
    output_flags(p)
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("mc", help="Monte Carlo estimate at one scenario")
    _add_scenario_flags(p)
    _add_mc_flags(p)
    p.add_argument("--mode", choices=montecarlo.MODES, default="distributional")
    output_flags(p)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("sweep", help="run the sweep described by a config file")
    _add_scenario_flags(p, sweep_keys=True)
    _add_mc_flags(p)
    output_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("figure", help="run a figure preset")
    p.add_argument("id", choices=sweep.FIGURES)
    _add_scenario_flags(p)
    _add_mc_flags(p)
    p.add_argument("--engines", default="theory,mc_distributional")
    output_flags(p)
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("validate", help="run the acceptance checks")
    _add_scenario_flags(p)
    p.add_argument("--seed", dest="sweep.seed", metavar="SEED")
    p.add_argument("--criteria", help="comma list of criterion ids (default: all)")
    p.add_argument("--mc-scale", type=float, default=1.0,
                   help="multiply every Monte Carlo trial count (e.g. 0.001 for a smoke run)")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvalidArgumentError as exc:
        print(f"invalid argument: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericFailure as exc:
        print(f"numeric failure: {exc} {exc.diagnostics}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
