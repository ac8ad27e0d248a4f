#!/usr/bin/env python3
"""Run every figure experiment and write one CSV per figure.

Usage:
    python scripts/run_figures.py [--out results] [--config FILE]
                                  [--reps N] [--seed N] [--figures fig3,fig5]

Each CSV carries a provenance header with the effective configuration, the
experiment overrides, and the recovery deadline at every sweep point, so a
re-run with the same arguments is byte-identical.
"""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from mhlogsim.config import default_config, parse_config
from mhlogsim.experiments import (
    FIGURE_IDS,
    check_trends,
    emit_csv,
    figure_spec,
    provenance_lines,
    run_figure,
)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results")
    parser.add_argument("--config")
    parser.add_argument("--reps", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--figures", default=",".join(FIGURE_IDS),
                        help="comma-separated subset of figure ids")
    args = parser.parse_args()

    config = parse_config(args.config) if args.config else default_config()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    any_violations = False
    for figure_id in args.figures.split(","):
        figure_id = figure_id.strip()
        t0 = time.time()
        spec = figure_spec(figure_id, config, reps=args.reps, master_seed=args.seed)
        rows = run_figure(spec, config)
        path = emit_csv(rows, out_dir / f"{figure_id}.csv",
                        provenance=provenance_lines(spec, config))
        violations = check_trends(figure_id, rows)
        status = "ok" if not violations else f"{len(violations)} trend violation(s)"
        print(f"{figure_id}: {len(rows)} rows -> {path}  [{time.time() - t0:.1f}s, {status}]")
        for v in violations:
            print(f"  - {v}")
        any_violations = any_violations or bool(violations)
    return 1 if any_violations else 0


if __name__ == "__main__":
    sys.exit(main())
