"""Command-line interface.

Subcommands:

  simulate    one replicated simulation of the configured strategy
  analytic    closed-form report for the configured parameters
  figure      run one figure experiment and write its CSV
  crosscheck  analytic vs simulated interval probabilities and cost

Exit codes: 0 success, 1 validation or config error, 2 I/O error,
3 trend violation (figure with --assert-trends only).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import analytic
from .config import Config, ConfigError, default_config, parse_config
from .engine import SimConfig, replicate
from .experiments import (
    FIGURE_IDS,
    check_trends,
    emit_csv,
    figure_spec,
    provenance_lines,
    run_figure,
    crosscheck_analytic,
)
from .model import ValidationError
from .strategies import StrategyKind

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_TREND = 3


def _load_config(path: str | None) -> Config:
    if path is None:
        return default_config()
    return parse_config(path)


def _cmd_simulate(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    strategy = StrategyKind(args.strategy) if args.strategy else config.strategy
    seed = args.seed if args.seed is not None else config.sim.seed
    sim_cfg = SimConfig(
        sim=config.sim,
        cost=config.cost,
        tree=config.build_tree(),
        p_same_region=config.p_same_region,
    )
    runs, summary = replicate(sim_cfg, strategy, seed, config.sim.replications)
    print(f"strategy {strategy.value}, seed {seed}, replications {len(runs)}")
    width = max(len(name) for name in summary)
    for name, (mean, lo, hi) in summary.items():
        print(f"{name:<{width}}  mean {mean:.6g}  ci95 [{lo:.6g}, {hi:.6g}]")
    return EXIT_OK


def _cmd_analytic(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    report = analytic.build_report(
        config.sim,
        config.cost,
        erratum_bound=config.frcr_erratum_bound,
        p_prop=args.p_prop,
        p_lazy=args.p_lazy,
    )
    print(report.as_text())
    print()
    print(report.CSV_HEADER)
    print(report.as_csv_row())
    return EXIT_OK


def _cmd_figure(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    spec = figure_spec(args.figure, config, reps=args.reps, master_seed=args.seed)
    rows = run_figure(spec, config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / f"{args.figure}.csv"
    emit_csv(rows, out_path, provenance=provenance_lines(spec, config))
    print(f"wrote {out_path} ({len(rows)} rows)")
    if args.assert_trends:
        violations = check_trends(args.figure, rows)
        if violations:
            for v in violations:
                print(f"trend violation: {v}", file=sys.stderr)
            return EXIT_TREND
        print("trends ok")
    return EXIT_OK


def _cmd_crosscheck(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    report = crosscheck_analytic(config, n_intervals=args.intervals, seed=args.seed)
    print(report.as_text())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mhlogsim",
        description=(
            "Simulate and analyze log-management strategies for mobile-host "
            "transaction recovery in a cellular network."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run replicated simulations")
    p_sim.add_argument("--config", help="config file (defaults apply if omitted)")
    p_sim.add_argument("--strategy", choices=[s.value for s in StrategyKind])
    p_sim.add_argument("--seed", type=int)
    p_sim.set_defaults(func=_cmd_simulate)

    p_an = sub.add_parser("analytic", help="print the closed-form report")
    p_an.add_argument("--config")
    p_an.add_argument("--p-prop", type=float, dest="p_prop",
                      help="measured recovery probability of the proposed strategy")
    p_an.add_argument("--p-lazy", type=float, dest="p_lazy",
                      help="measured recovery probability of the lazy strategy")
    p_an.set_defaults(func=_cmd_analytic)

    p_fig = sub.add_parser("figure", help="run a figure experiment, write CSV")
    p_fig.add_argument("figure", choices=FIGURE_IDS)
    p_fig.add_argument("--config")
    p_fig.add_argument("--out", required=True, help="output directory")
    p_fig.add_argument("--reps", type=int)
    p_fig.add_argument("--seed", type=int)
    p_fig.add_argument("--assert-trends", action="store_true")
    p_fig.set_defaults(func=_cmd_figure)

    p_cc = sub.add_parser("crosscheck", help="analytic vs simulation agreement")
    p_cc.add_argument("--config")
    p_cc.add_argument("--intervals", type=int, default=100_000)
    p_cc.add_argument("--seed", type=int)
    p_cc.set_defaults(func=_cmd_crosscheck)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
