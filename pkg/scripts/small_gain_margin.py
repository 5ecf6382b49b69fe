#!/usr/bin/env python3
"""Probe closed-loop behavior as the operator gain k_h crosses the
small-gain boundary k_h * (1/k) = 1.

For each gain the script runs the admittance scenario and reports peak
signals, the prefix L2-bound audit, and whether the loop is certified. The
theorem is sufficient only: expect graceful boundedness below 1, and growth
(eventually overflow) well above it.

Usage: python scripts/small_gain_margin.py [--values 0.0 0.25 ...] [--duration 120]
"""

import argparse
import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from hapticgate import audit_l2_gain, load_scenario, run_scenario  # noqa: E402
from hapticgate.scenario import with_overrides  # noqa: E402
from hapticgate.simulation import SimulationError, trace_columns  # noqa: E402

DEFAULT_VALUES = [0.0, 0.25, 0.5, 0.75, 0.9, 1.1, 1.5]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--values", nargs="+", type=float, default=DEFAULT_VALUES)
    parser.add_argument("--duration", type=float, default=120.0)
    args = parser.parse_args()

    base = with_overrides(
        load_scenario(ROOT / "configs" / "small_gain_sweep.yaml"), duration=args.duration
    )
    print(f"{'k_h':>6} {'k_h/k':>7} {'certified':>10} {'peak|x2|':>12} {'peak|F|':>12} "
          f"{'min h':>12} {'l2 audit':>9}")
    for k_h in args.values:
        cfg = with_overrides(base, k_h=k_h)
        try:
            trace = run_scenario(cfg)
        except SimulationError as exc:
            print(f"{k_h:>6.3g} {cfg.small_gain_product:>7.3g} {str(cfg.small_gain_certified):>10} "
                  f"{'diverged at step ' + str(exc.step_index):>38}")
            continue
        cols = trace_columns(trace)
        l2 = audit_l2_gain(trace, cfg.params).checks[0]
        print(f"{k_h:>6.3g} {cfg.small_gain_product:>7.3g} {str(cfg.small_gain_certified):>10} "
              f"{np.linalg.norm(cols['x2'], axis=1).max():>12.4g} "
              f"{np.linalg.norm(cols['f'], axis=1).max():>12.4g} "
              f"{cols['h'].min():>12.4g} {'pass' if l2.passed else 'FAIL':>9}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
