"""Command line entry point: ``jrcswarm {run,sweep,validate}``."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from typing import Sequence

from jrcswarm.errors import ConfigError, ConfigIssue, JrcError
from jrcswarm.harness import (
    METHODS,
    emit_csv,
    emit_summary_csv,
    load_sweep,
    record_for,
    run_method,
    run_sweep,
)
from jrcswarm.scenario import INTERFERENCE_MODES, ScenarioConfig, load_config, validate_config

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2

log = logging.getLogger("jrcswarm")


def _global_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--seed", type=int, default=default, help="override the config seed")
    parser.add_argument("--method", choices=sorted(METHODS), default=default,
                        help="placement method (run) or single method to sweep")
    parser.add_argument("--interference", choices=INTERFERENCE_MODES, default=default,
                        help="include cross-UAV interference in the SINR")
    parser.add_argument("--timing", action="store_true",
                        default=argparse.SUPPRESS if suppress else False,
                        help="record wall time (makes CSV output run-dependent)")
    parser.add_argument("-v", "--verbose", action="store_true",
                        default=argparse.SUPPRESS if suppress else False)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jrcswarm", description=__doc__)
    _global_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="solve one scenario")
    _global_options(run, suppress=True)
    run.add_argument("--config", required=True)
    run.add_argument("--trace-out")
    run.add_argument("--metrics-out")

    sweep = sub.add_parser("sweep", help="target-count or power sweep")
    _global_options(sweep, suppress=True)
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--sweep", required=True)
    sweep.add_argument("--out", required=True)
    sweep.add_argument("--summary-out")

    val = sub.add_parser("validate", help="check a scenario file")
    _global_options(val, suppress=True)
    val.add_argument("--config", required=True)
    return parser


def _load(args) -> ScenarioConfig:
    try:
        cfg = load_config(args.config)
    except OSError as exc:
        raise ConfigError([ConfigIssue(args.config, f"cannot read: {exc.strerror or exc}")]) from exc
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.interference is not None:
        changes["interference"] = args.interference
    return validate_config(cfg.replace(**changes)) if changes else cfg


def _cmd_validate(args) -> int:
    cfg = _load(args)
    print(f"ok: {cfg.n_uavs} targets, p_t={cfg.total_power_pt:g} W, "
          f"eta_min={cfg.radar.snr_min_eta:g}, R_min={cfg.comm.rate_min_Rmin:g} bit/s")
    return EXIT_OK


def _cmd_run(args) -> int:
    cfg = _load(args)
    method = args.method or "djrc"
    result, elapsed = run_method(cfg, method, args.timing)
    if args.trace_out:
        emit_csv(result, args.trace_out)
    if args.metrics_out:
        emit_csv([record_for(result, "single", 0, 0, elapsed)], args.metrics_out)
    status = "converged" if result.converged else "not converged"
    print(f"{method}: {status} after {result.iterations_used} iterations, "
          f"eta_total={result.eta_total:.6g}, rate_total={result.rate_total:.6g} bit/s")
    for entry in result.report.failures():
        print(f"  violated {entry.id} [{entry.subject}] slack={entry.slack:.6g}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    cfg = _load(args)
    try:
        spec = load_sweep(args.sweep)
    except OSError as exc:
        raise ConfigError([ConfigIssue(args.sweep, f"cannot read: {exc.strerror or exc}")]) from exc
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.method is not None:
        changes["methods"] = (args.method,)
    if changes:
        spec = dataclasses.replace(spec, **changes)

    def progress(rec):
        log.info("%s %s=%g trial %d: eta=%.4g rate=%.4g converged=%s", rec.method,
                 rec.sweep_kind, rec.sweep_value, rec.trial, rec.eta_total, rec.rate_total,
                 rec.converged)

    records = run_sweep(cfg, spec, timing=args.timing, progress=progress)
    emit_csv(records, args.out)
    if args.summary_out:
        emit_summary_csv(records, args.summary_out)
    print(f"wrote {len(records)} records to {args.out}")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"run": _cmd_run, "sweep": _cmd_sweep, "validate": _cmd_validate}[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        print("configuration error:", file=sys.stderr)
        for issue in exc.issues:
            print(f"  {issue}", file=sys.stderr)
        return EXIT_CONFIG
    except (JrcError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
