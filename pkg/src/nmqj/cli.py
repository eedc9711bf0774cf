"""Command-line interface.

Subcommands:
  simulate <config.json>   run a scenario; writes series/events/summary
  compare <a.csv> <b.csv>  compare two series files elementwise
  rates                    emit decay and shift rate tables for a model
  report <rundir>          render figures next to an existing run's output
  selftest                 run the acceptance suite

Exit codes: 0 success, 1 comparison failure, 2 configuration error,
3 runtime or I/O error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import build_model, load_config
from .errors import ConfigError, GridMismatch, NmqjError
from .runner import EXIT_CONFIG_ERROR, EXIT_RUNTIME_ERROR, run_scenario
from .series import compare_series, read_csv


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except GridMismatch as exc:
        print(f"comparison inputs incompatible: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except (NmqjError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME_ERROR


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nmqj",
        description="Quantum-jump unraveling of time-local master equations "
        "with negative decay rates",
    )
    sub = parser.add_subparsers(required=True)

    p_sim = sub.add_parser("simulate", help="run a scenario from a JSON config")
    p_sim.add_argument("config", type=Path)
    p_sim.add_argument("--outdir", type=Path, default=None,
                       help="override the output directory")
    p_sim.add_argument("--plot", action="store_true",
                       help="render figures alongside the CSV output")
    p_sim.set_defaults(func=cmd_simulate)

    p_cmp = sub.add_parser("compare", help="compare two series CSV files")
    p_cmp.add_argument("a", type=Path)
    p_cmp.add_argument("b", type=Path)
    p_cmp.add_argument("--tol", type=float, default=0.01)
    p_cmp.set_defaults(func=cmd_compare)

    p_rates = sub.add_parser("rates", help="emit decay/shift rate tables")
    p_rates.add_argument("--model", required=True,
                         choices=("jc", "lambda", "vee", "ladder"))
    p_rates.add_argument("--coupling", type=float, default=None)
    p_rates.add_argument("--detunings", type=str, default=None,
                         help="comma-separated detunings in units of the width")
    p_rates.add_argument("--t-max", type=float, default=10.0)
    p_rates.add_argument("--dt", type=float, default=0.01)
    p_rates.add_argument("-o", "--output", type=Path, default=None,
                         help="write CSV here instead of stdout")
    p_rates.add_argument("--figure", type=Path, default=None,
                         help="also render the rate curves to this file")
    p_rates.set_defaults(func=cmd_rates)

    p_rep = sub.add_parser("report", help="render figures for an existing run")
    p_rep.add_argument("rundir", type=Path)
    p_rep.set_defaults(func=cmd_report)

    p_self = sub.add_parser("selftest", help="run the acceptance suite")
    p_self.add_argument("criteria", nargs="*", type=int,
                        help="criterion numbers to run (default: all)")
    p_self.set_defaults(func=cmd_selftest)
    return parser


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    if args.outdir is not None:
        cfg = replace(cfg, outputs=replace(cfg.outputs, directory=str(args.outdir)))
    if args.plot:
        cfg = replace(cfg, outputs=replace(cfg.outputs, figures=True))
    result = run_scenario(cfg)
    for name, rep in result.summary["comparisons"].items():
        status = "pass" if rep["passed"] else "FAIL"
        print(f"{name}: max deviation {rep['max_deviation']:.3e} "
              f"(tol {rep['tolerance']:g}) {status}")
    for w in result.summary["warnings"]:
        print(f"warning: {w}")
    print(f"artifacts written to {result.outdir}")
    return result.exit_code


def cmd_compare(args) -> int:
    a = read_csv(args.a)
    b = read_csv(args.b)
    rep = compare_series(a, b, args.tol)
    for label, dev in sorted(rep.per_element.items()):
        print(f"{label}: {dev:.6e}")
    print(f"max deviation {rep.max_deviation:.6e} (tol {rep.tolerance:g}): "
          + ("pass" if rep.passed else "FAIL"))
    return 0 if rep.passed else 1


def cmd_rates(args) -> int:
    from .config import ModelConfig

    detunings = None
    if args.detunings is not None:
        detunings = tuple(float(x) for x in args.detunings.split(","))
    mc = ModelConfig(name=args.model, coupling=args.coupling, detunings=detunings)
    model = build_model(mc)
    if args.dt <= 0 or args.t_max <= 0:
        raise ConfigError("dt and t-max must be positive")
    times = np.arange(0, int(round(args.t_max / args.dt)) + 1) * args.dt
    decay = [ch.rate.decay_rate(times) for ch in model.channels]
    lamb = [ch.rate.lamb_shift_rate(times) for ch in model.channels]
    header = ["t"]
    header += [f"delta_{ch.label}" for ch in model.channels]
    header += [f"lambda_{ch.label}" for ch in model.channels]
    lines = [",".join(header)]
    for k, t in enumerate(times):
        row = [repr(float(t))]
        row += [repr(float(d[k])) for d in decay]
        row += [repr(float(l[k])) for l in lamb]
        lines.append(",".join(row))
    text = "\n".join(lines) + "\n"
    if args.output is None:
        sys.stdout.write(text)
    else:
        args.output.write_text(text)
        print(f"rate table written to {args.output}")
    if args.figure is not None:
        from .report import render_rate_tables_figure

        render_rate_tables_figure(args.figure, times, decay, lamb)
        print(f"rate figure written to {args.figure}")
    return 0


def cmd_report(args) -> int:
    from .report import render_run

    series_path = args.rundir / "series.csv"
    if not series_path.exists():
        raise ConfigError(f"{series_path} not found; run 'simulate' first")
    series = read_csv(series_path)
    written = render_run(args.rundir, series)
    for p in written:
        print(f"wrote {p}")
    return 0


def cmd_selftest(args) -> int:
    from .acceptance import run_all

    indices = args.criteria or None
    results = run_all(indices, echo=True)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return 0 if not failed else 1


if __name__ == "__main__":
    sys.exit(main())
