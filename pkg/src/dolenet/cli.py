"""Command-line entry point: run scenarios, validate configs, recompute
aggregates from exported logs.

Exit codes: 0 on a complete consistency-clean run, 2 on bad arguments or
configuration, 3 when a consistency violation aborts a run.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

from . import __version__, analysis
from .accounting import SFCViolationError, write_reports_csv
from .engine import run_replicate, solve_stationary
from .params import (SCENARIOS, ConfigError, ScenarioConfig, read_config,
                     scenario_config)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SFC = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dolenet",
        description="Agent-based stock-flow-consistent labour market "
                    "simulator")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one named scenario or all nine")
    run.add_argument("--scenario", default="baseline",
                     help="scenario name or 'all'")
    run.add_argument("--config", help="key = value config file with "
                     "overrides applied on top of the scenario preset")
    run.add_argument("--seed", type=int, default=0, help="master seed")
    run.add_argument("--out", default=os.environ.get("DOLENET_OUT", "out"),
                     help="output directory (env DOLENET_OUT)")
    run.add_argument("--replicates", type=int, default=None)
    run.add_argument("--steps", type=int, default=None)
    run.add_argument("--burn-in", type=int, default=None)
    run.add_argument("--jobs", type=int, default=1,
                     help="parallel replicate workers")
    run.add_argument("--expectation-mode", choices=["adaptive", "as-written"])
    run.add_argument("--expiry-mode", choices=["calendar", "spell"])
    run.add_argument("--sfc", choices=["abort", "warn"], default="abort",
                     help="what a consistency violation does")
    run.add_argument("--events", action="store_true",
                     help="export the match-event log per scenario")
    run.add_argument("--sfc-report", action="store_true",
                     help="export per-step consistency residuals")

    val = sub.add_parser("validate", help="validate a config file")
    val.add_argument("--config", required=True)

    met = sub.add_parser("metrics",
                         help="recompute aggregates from exported logs")
    met.add_argument("--in", dest="in_dir", required=True)
    met.add_argument("--burn-in", type=int, default=50)
    met.add_argument("--hp-lambda", type=float, default=1600.0)
    return parser


def _resolve_config(args, name: str) -> ScenarioConfig:
    if args.config:
        cfg = read_config(args.config)
        cfg = replace(cfg, scenario=name, delta_g=SCENARIOS[name][0],
                      epsilon=SCENARIOS[name][1])
    else:
        cfg = scenario_config(name)
    overrides = {"master_seed": args.seed}
    if args.replicates is not None:
        overrides["replicates"] = args.replicates
    if args.steps is not None:
        overrides["steps"] = args.steps
    if args.burn_in is not None:
        overrides["burn_in"] = args.burn_in
    if args.expectation_mode:
        overrides["expectation_mode"] = args.expectation_mode
    if args.expiry_mode:
        overrides["expiry_mode"] = args.expiry_mode
    overrides["sfc_strict"] = args.sfc == "abort"
    cfg = replace(cfg, **overrides)
    cfg.validate()
    return cfg


def _cmd_run(args) -> int:
    if args.scenario.lower() == "all":
        names = list(SCENARIOS)
    else:
        key = args.scenario.lower()
        if key not in SCENARIOS:
            print(f"unknown scenario {args.scenario!r}; valid names: "
                  + ", ".join(SCENARIOS), file=sys.stderr)
            return EXIT_CONFIG
        names = [key]

    out_root = Path(args.out)
    out_root.mkdir(parents=True, exist_ok=True)
    configs = {name: _resolve_config(args, name) for name in names}

    manifest_path = out_root / "manifest.json"
    manifest = {
        "version": __version__,
        "master_seed": args.seed,
        "scenarios": {name: {"config_hash": cfg.config_hash(),
                             "delta_g": cfg.delta_g,
                             "epsilon": cfg.epsilon,
                             "replicates": cfg.replicates,
                             "steps": cfg.steps}
                      for name, cfg in configs.items()},
        "started_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "status": "running",
    }
    if manifest_path.exists():
        try:
            old = json.loads(manifest_path.read_text())
            if (old.get("master_seed") == manifest["master_seed"]
                    and old.get("scenarios") == manifest["scenarios"]):
                manifest["reproduction"] = True
        except (json.JSONDecodeError, OSError):
            pass
    manifest_path.write_text(json.dumps(manifest, indent=2))

    for name, cfg in configs.items():
        scen_dir = out_root / name
        scen_dir.mkdir(exist_ok=True)
        frames = []
        events = []
        try:
            if args.jobs > 1:
                import concurrent.futures as cf
                with cf.ProcessPoolExecutor(max_workers=args.jobs) as pool:
                    results = list(pool.map(
                        _replicate_worker,
                        [(cfg, r) for r in range(cfg.replicates)]))
            else:
                results = [_replicate_worker((cfg, r))
                           for r in range(cfg.replicates)]
            if args.sfc_report:
                # per-step residuals for the first replicate
                _, _, _, reports = run_replicate(cfg, 0,
                                                 collect_reports=True)
                write_reports_csv(reports, scen_dir / "consistency.csv")
        except SFCViolationError as exc:
            print(f"{name}: {exc}", file=sys.stderr)
            manifest["status"] = "partial"
            manifest_path.write_text(json.dumps(manifest, indent=2))
            return EXIT_SFC
        for frame, log, _digest in results:
            frames.append(frame)
            events.append(log)

        analysis.write_long_csv(scen_dir / "timeseries.csv", frames)
        series = analysis.aggregate(frames, cfg.burn_in, cfg.hp_lambda)
        analysis.write_aggregated_csv(scen_dir / "aggregated.csv", series)
        if args.events:
            merged = events[0]
            for extra in events[1:]:
                merged.events.extend(extra.events)
            merged.to_csv(scen_dir / "events.csv")
        print(f"{name}: {cfg.replicates} replicates x {cfg.steps} steps "
              f"-> {scen_dir}")

    manifest["status"] = "complete"
    manifest["finished_at"] = time.strftime("%Y-%m-%dT%H:%M:%SZ",
                                            time.gmtime())
    manifest["outputs"] = [str(out_root / n) for n in names]
    manifest_path.write_text(json.dumps(manifest, indent=2))
    return EXIT_OK


def _replicate_worker(args):
    cfg, r = args
    return run_replicate(cfg, r)


def _cmd_validate(args) -> int:
    try:
        cfg = read_config(args.config)
        cfg.validate()
        solve_stationary(cfg)
    except (ConfigError, ValueError) as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"config ok (hash {cfg.config_hash()})")
    return EXIT_OK


def _cmd_metrics(args) -> int:
    in_dir = Path(args.in_dir)
    found = sorted(in_dir.glob("*/timeseries.csv"))
    if not found:
        print(f"no timeseries.csv files under {in_dir}", file=sys.stderr)
        return EXIT_CONFIG
    for ts_path in found:
        frames = analysis.read_long_csv(ts_path)
        series = analysis.aggregate(frames, args.burn_in, args.hp_lambda)
        out_path = ts_path.parent / "aggregated.csv"
        analysis.write_aggregated_csv(out_path, series)
        print(f"recomputed {out_path}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "metrics":
            return _cmd_metrics(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SFCViolationError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_SFC
    parser.error("no command")
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
