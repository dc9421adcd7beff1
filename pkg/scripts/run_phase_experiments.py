#!/usr/bin/env python3
"""Run the phase-transition experiment configs and summarize the crossings.

For each JSON config this runs the full seeded Monte Carlo grid, writes the
success-rate curve as CSV, and prints the empirical 50% crossing next to the
predicted threshold d * m_tilde for every strategy.

Example:
    python3 scripts/run_phase_experiments.py configs/k2_phase.json \
        --outdir results --jobs 2
"""

import argparse
import pathlib
import sys
import time

from wbp import load_experiment_config, run_phase_curve


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("configs", nargs="+", help="experiment config JSON files")
    parser.add_argument("--outdir", default="results", help="directory for CSV output")
    parser.add_argument("--jobs", type=int, default=None,
                        help="worker processes (default WBP_JOBS or 1)")
    args = parser.parse_args()

    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    for path in args.configs:
        config = load_experiment_config(path)
        name = pathlib.Path(path).stem
        start = time.perf_counter()
        curve = run_phase_curve(config, jobs=args.jobs)
        elapsed = time.perf_counter() - start

        out_path = outdir / f"{name}.csv"
        curve.write_csv(out_path)
        print(f"{name}: {len(config.m_values)} grid points x "
              f"{config.trials_per_m} trials in {elapsed:.1f} s -> {out_path}")
        if curve.solver_failures:
            print(f"  solver failures: {curve.solver_failures}", file=sys.stderr)
        for strategy in config.strategies:
            label = strategy.label
            predicted = curve.predicted_threshold(label)
            crossing = curve.crossing(label)
            shown = f"{crossing:.2f}" if crossing is not None else "none"
            print(f"  {label:24s} predicted {predicted:6.2f}   crossing {shown}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
