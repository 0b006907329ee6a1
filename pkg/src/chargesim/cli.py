"""Command-line interface.

Subcommands:

* ``run <config.json>``   -- execute a sweep, write CSV + manifest.
* ``gamma``               -- collective advantage for one (model, side, N, g).
* ``ratio``               -- quantum/classical ratio R, optionally swept over
                             the classical tilt epsilon.
* ``fit``                 -- power-law fit of Gamma(N) from a sweep CSV.
* ``oracle``              -- print the universal power constant (x_star, Y).

Exit codes: 0 success, 1 configuration error, 2 sweep rows failed.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import replace
from pathlib import Path

from .metrics import collective_advantage, fit_power_law, quantum_classical_ratio
from .models import ModelKind, ModelSpec, NumericsConfig, Side
from .oracle import power_constant
from .runner import CSV_COLUMNS, ConfigError, load_sweep_config, run_sweep

EPSILON_SWEEP = (1e-4, 1e-3, 1e-2)


def _common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--omega0", type=float, default=1.0,
                        help="characteristic energy (default 1.0)")
    parser.add_argument("--epsilon", type=float, default=1e-3,
                        help="classical spin tilt in radians (default 1e-3)")
    parser.add_argument("--out", type=Path, default=None,
                        help="output path override")
    parser.add_argument("--workers", type=int, default=None,
                        help="worker process count override")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chargesim",
        description="Charger-battery charging dynamics: quantum vs classical",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a sweep config (JSON)")
    p_run.add_argument("config", type=Path)
    p_run.add_argument("--timing", action="store_true",
                       help="record wall times in the CSV (breaks byte-reproducibility)")
    _common_flags(p_run)

    p_gamma = sub.add_parser("gamma", help="collective advantage Gamma")
    p_gamma.add_argument("--model", required=True, choices=[k.value for k in ModelKind])
    p_gamma.add_argument("--side", required=True, choices=[s.value for s in Side])
    p_gamma.add_argument("--N", required=True, type=int, dest="n_units")
    p_gamma.add_argument("--g", required=True, type=float)
    _common_flags(p_gamma)

    p_ratio = sub.add_parser("ratio", help="quantum/classical ratio R")
    p_ratio.add_argument("--model", required=True, choices=[k.value for k in ModelKind])
    p_ratio.add_argument("--N", required=True, type=int, dest="n_units")
    p_ratio.add_argument("--g", required=True, type=float)
    p_ratio.add_argument("--epsilon-sweep", action="store_true",
                         help=f"repeat R over epsilon in {EPSILON_SWEEP} and report the spread")
    _common_flags(p_ratio)

    p_fit = sub.add_parser("fit", help="power-law fit of Gamma(N) from a sweep CSV")
    p_fit.add_argument("--input", required=True, type=Path)
    p_fit.add_argument("--model", required=True, choices=[k.value for k in ModelKind])
    p_fit.add_argument("--side", required=True, choices=[s.value for s in Side])
    p_fit.add_argument("--g", type=float, default=None,
                       help="restrict the fit to one coupling value")
    p_fit.add_argument("--min-N", type=int, default=8,
                       help="exclude sizes below this from the fit (default 8)")
    _common_flags(p_fit)

    p_oracle = sub.add_parser("oracle", help="print the power constant (x_star, Y)")
    _common_flags(p_oracle)

    return parser


def _cmd_run(args) -> int:
    config = load_sweep_config(args.config)
    overrides = {}
    if args.out is not None:
        overrides["out"] = str(args.out)
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.timing:
        overrides["record_timing"] = True
    if overrides:
        config = replace(config, **overrides)
    result = run_sweep(config)
    print(f"wrote {result.csv_path} ({len(result.rows)} rows) and {result.manifest_path}")
    if result.n_failed:
        for row in result.rows:
            if row.status != "ok":
                print(f"  failed: {row.model}/{row.side} N={row.n_units} "
                      f"g={row.g_over_omega0} -> {row.status}", file=sys.stderr)
        return 2
    return 0


def _cmd_gamma(args) -> int:
    template = ModelSpec(ModelKind(args.model), Side(args.side), args.n_units,
                         args.g, args.omega0, args.epsilon)
    result = collective_advantage(template, args.n_units)
    print(f"model={args.model} side={args.side} N={args.n_units} g/omega0={args.g / args.omega0:g}")
    print(f"gamma = {result.gamma:.10g}")
    print(f"P_bar_collective = {result.p_bar_collective:.10g}")
    print(f"P_bar_single     = {result.p_bar_single:.10g}")
    if result.cutoff is not None:
        print(f"cutoff = {result.cutoff}")
    return 0


def _cmd_ratio(args) -> int:
    kind = ModelKind(args.model)
    epsilons = EPSILON_SWEEP if args.epsilon_sweep else (args.epsilon,)
    values = []
    for eps in epsilons:
        result = quantum_classical_ratio(kind, args.n_units, args.g,
                                         omega0=args.omega0, epsilon=eps)
        values.append(result.value)
        print(f"epsilon={eps:g}  R = {result.value:.10g}  "
              f"(gamma_qu = {result.quantum.gamma:.10g}, "
              f"gamma_cl = {result.classical.gamma:.10g})")
    if args.epsilon_sweep:
        print(f"spread = {max(values) - min(values):.3e}")
    return 0


def _cmd_fit(args) -> int:
    path: Path = args.input
    if not path.exists():
        raise ConfigError(f"input CSV not found: {path}")
    with path.open(newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames != list(CSV_COLUMNS):
            raise ConfigError("input CSV does not match the sweep schema")
        points = []
        for row in reader:
            if row["status"] != "ok" or not row["gamma"]:
                continue
            if row["model"] != args.model or row["side"] != args.side:
                continue
            if args.g is not None and abs(float(row["g_over_omega0"]) - args.g) > 1e-12:
                continue
            if int(row["N"]) < args.min_N:
                continue
            points.append((int(row["N"]), float(row["gamma"])))
    fit = fit_power_law(points)
    print(f"alpha = {fit.alpha:.6g}")
    print(f"prefactor = {fit.prefactor:.6g}")
    print(f"residual_rms = {fit.residual_rms:.3e} over {fit.n_points} points")
    return 0


def _cmd_oracle(args) -> int:
    pc = power_constant()
    print(f"x_star = {pc.x_star:.12f}")
    print(f"Y = {pc.y_max:.12f}")
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "gamma": _cmd_gamma,
    "ratio": _cmd_ratio,
    "fit": _cmd_fit,
    "oracle": _cmd_oracle,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
