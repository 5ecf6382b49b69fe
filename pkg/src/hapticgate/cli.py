"""Batch CLI: run scenarios, audit traces, sweep parameters, serve live.

Exit codes: 0 all requested work passed, 1 audit failure or aborted run,
2 configuration error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .audits import audit_characteristics, audit_forward_invariance, audit_l2_gain
from .errors import ConfigError
from .scenario import load_scenario, with_mode, with_overrides
from .simulation import SimulationError, run_scenario, trace_columns
from .trace_io import FORMATS, export_trace, import_trace

EXIT_OK = 0
EXIT_AUDIT_FAIL = 1
EXIT_CONFIG = 2

AUDIT_NAMES = ("l2", "invariance", "characteristics")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hapticgate",
        description="Haptic shared-control teleoperation simulator and audit suite.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="simulate a scenario and optionally export the trace")
    run_p.add_argument("config", help="scenario YAML file")
    run_p.add_argument("--mode", choices=("passivity", "finite_gain", "none"), help="override render mode")
    run_p.add_argument("--out", help="trace output path")
    run_p.add_argument("--format", choices=FORMATS, default="csv")

    audit_p = sub.add_parser("audit", help="audit a previously exported trace")
    audit_p.add_argument("trace", help="trace file (csv or jsonl)")
    audit_p.add_argument("--config", required=True, help="scenario YAML the trace was produced from")
    audit_p.add_argument(
        "--check",
        default="l2,invariance,characteristics",
        help="comma-separated subset of: l2, invariance, characteristics",
    )

    sweep_p = sub.add_parser("sweep", help="run a scenario across parameter values")
    sweep_p.add_argument("config", help="scenario YAML file")
    sweep_p.add_argument("--param", required=True, choices=("k_h", "k", "k_v", "e_max"))
    sweep_p.add_argument("--values", required=True, nargs="+", type=float)

    serve_p = sub.add_parser("serve", help="run the live teleoperation service")
    serve_p.add_argument("config", help="scenario YAML file")
    serve_p.add_argument("--host", default=os.environ.get("HAPTICGATE_HOST", "127.0.0.1"))
    serve_p.add_argument("--port", type=int, default=int(os.environ.get("HAPTICGATE_PORT", "8710")))
    serve_p.add_argument("--ui", default=None, help="directory of built cockpit UI assets to serve at /")

    return parser


def _cmd_run(args) -> int:
    config = load_scenario(args.config)
    if args.mode:
        config = with_mode(config, args.mode)
    if not config.small_gain_certified:
        print(
            f"warning: k_h/k = {config.small_gain_product:.3g} >= 1 — "
            "small-gain stability is not certified for this scenario"
        )
    try:
        trace = run_scenario(config)
    except SimulationError as exc:
        print(f"run aborted at step {exc.step_index}: {exc}")
        if args.out and exc.trace:
            export_trace(exc.trace, args.format, args.out)
            print(f"partial trace ({len(exc.trace)} samples) written to {args.out}")
        return EXIT_AUDIT_FAIL
    cols = trace_columns(trace)
    print(
        f"{config.name}: {len(trace)} steps over {config.duration:g}s, mode={config.mode}, "
        f"min h = {cols['h'].min():.4f}, max |F| = {np.linalg.norm(cols['f'], axis=1).max():.4f}"
    )
    if args.out:
        export_trace(trace, args.format, args.out)
        print(f"trace written to {args.out}")
    return EXIT_OK


def _cmd_audit(args) -> int:
    config = load_scenario(args.config)
    requested = [c.strip() for c in args.check.split(",") if c.strip()]
    unknown = set(requested) - set(AUDIT_NAMES)
    if unknown:
        raise ConfigError(f"unknown audit check(s) {sorted(unknown)}; expected subset of {AUDIT_NAMES}")
    trace = import_trace(args.trace)
    if not trace:
        raise ConfigError(f"trace {args.trace} has no samples")
    report = None
    for name in requested:
        if name == "l2":
            part = audit_l2_gain(trace, config.params)
        elif name == "invariance":
            part = audit_forward_invariance(trace, config.halfspace)
        else:
            part = audit_characteristics(trace, config.halfspace, config.params)
        report = part if report is None else report + part
    print(report.summary())
    return EXIT_OK if report.passed else EXIT_AUDIT_FAIL


def _cmd_sweep(args) -> int:
    base = load_scenario(args.config)
    all_pass = True
    print(f"{'value':>10}  {'certified':>9}  {'max|x2|':>10}  {'max|F|':>10}  {'min h':>10}  l2")
    for value in args.values:
        config = with_overrides(base, **{args.param: value})
        try:
            trace = run_scenario(config)
        except SimulationError as exc:
            all_pass = False
            print(f"{value:>10.4g}  {str(config.small_gain_certified):>9}  DIVERGED at step {exc.step_index}")
            continue
        cols = trace_columns(trace)
        l2 = audit_l2_gain(trace, config.params)
        all_pass &= l2.passed
        print(
            f"{value:>10.4g}  {str(config.small_gain_certified):>9}  "
            f"{np.linalg.norm(cols['x2'], axis=1).max():>10.4g}  "
            f"{np.linalg.norm(cols['f'], axis=1).max():>10.4g}  "
            f"{cols['h'].min():>10.4g}  {'PASS' if l2.passed else 'FAIL'}"
        )
    return EXIT_OK if all_pass else EXIT_AUDIT_FAIL


def _cmd_serve(args) -> int:
    from .service import serve

    config = load_scenario(args.config)
    serve(config, host=args.host, port=args.port, ui_dir=args.ui)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {"run": _cmd_run, "audit": _cmd_audit, "sweep": _cmd_sweep, "serve": _cmd_serve}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
