"""Command-line entry point: run scenarios, compare controllers, analyze, serve.

Exit codes: 0 success, 1 IO or runtime failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .engine import TraceLog, run_scenario
from .metrics import compare_runs, comparison_csv, compute_metrics, export_csv, render_comparison
from .scenario import (
    PURE_PURSUIT,
    STANLEY,
    TELEOP,
    ParseError,
    ScenarioSpec,
    ValidationError,
    builtin_scenarios,
    find_scenario,
    load_scenario,
)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2

_LATERAL_ALIASES = {"pp": PURE_PURSUIT, "pure_pursuit": PURE_PURSUIT, "stanley": STANLEY}


class ConfigError(Exception):
    pass


def _load(name_or_path: str, seed: int | None, lateral: str | None) -> ScenarioSpec:
    try:
        spec = load_scenario(find_scenario(name_or_path))
    except FileNotFoundError as exc:
        raise ConfigError(str(exc)) from exc
    except (ParseError, ValidationError) as exc:
        raise ConfigError(f"{name_or_path}: {exc}") from exc
    if seed is not None:
        spec = spec.with_seed(seed)
    if lateral is not None:
        spec = spec.with_lateral(_LATERAL_ALIASES[lateral])
    return spec


def _outdir(path: str) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_run(args: argparse.Namespace) -> int:
    spec = _load(args.scenario, args.seed, args.lateral)
    out = _outdir(args.out)
    trace = run_scenario(spec)
    trace.write_csv(out / "trace.csv")
    export_csv(compute_metrics(trace), out / "metrics.csv")
    print(f"wrote {out / 'trace.csv'} and {out / 'metrics.csv'}")
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    spec_pp = _load(args.scenario, args.seed, None).with_lateral(PURE_PURSUIT)
    if args.scenario_stanley is not None:
        spec_st = _load(args.scenario_stanley, args.seed, None).with_lateral(STANLEY)
        if spec_pp.seed != spec_st.seed:
            raise ConfigError(
                f"refusing to compare: seeds differ ({spec_pp.seed} vs {spec_st.seed})"
            )
        if not spec_pp.comparable_to(spec_st):
            raise ConfigError(
                "refusing to compare: scenarios differ beyond the lateral controller"
            )
    else:
        spec_st = spec_pp.with_lateral(STANLEY)
    out = _outdir(args.out)

    trace_pp = run_scenario(spec_pp)
    trace_st = run_scenario(spec_st)
    trace_pp.write_csv(out / "trace_pp.csv")
    trace_st.write_csv(out / "trace_stanley.csv")
    report_pp = compute_metrics(trace_pp)
    report_st = compute_metrics(trace_st)
    export_csv(report_pp, out / "metrics_pp.csv")
    export_csv(report_st, out / "metrics_stanley.csv")
    table = compare_runs(report_pp, report_st)
    comparison_csv(table, out / "comparison.csv", label_a="pure_pursuit", label_b="stanley")
    text = render_comparison(table, label_a="pure_pursuit", label_b="stanley")
    (out / "comparison.txt").write_text(text)
    print(text, end="")
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    spec = _load(args.scenario, None, None)
    out = _outdir(args.out)
    trace_path = Path(args.trace) if args.trace else out / "trace.csv"
    if not trace_path.is_file():
        raise ConfigError(f"trace file not found: {trace_path}")
    trace = TraceLog.read_csv(trace_path, spec)
    export_csv(compute_metrics(trace), out / "metrics.csv")
    print(f"wrote {out / 'metrics.csv'}")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    from .server import serve

    spec = _load(args.scenario, args.seed, None)
    if spec.maneuver.kind != TELEOP:
        spec = replace(spec, maneuver=replace(spec.maneuver, kind=TELEOP))
    static_dir = args.static if args.static else None
    try:
        serve(spec, args.host, args.port, static_dir=static_dir)
    except OSError as exc:
        print(f"error: cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="platoonsim",
        description="Deterministic platooning simulator: PID spacing control with "
        "Pure Pursuit or Stanley steering.",
        epilog=f"builtin scenarios: {', '.join(builtin_scenarios())}",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one scenario, write trace.csv and metrics.csv")
    run_p.add_argument("--scenario", required=True, help="builtin name or path to a YAML file")
    run_p.add_argument("--out", default="out", help="output directory (default: out)")
    run_p.add_argument("--lateral", choices=sorted(_LATERAL_ALIASES), help="override the lateral controller")
    run_p.add_argument("--seed", type=int, help="override the scenario seed")
    run_p.set_defaults(func=cmd_run)

    cmp_p = sub.add_parser(
        "compare", help="run the scenario under both lateral controllers and diff the metrics"
    )
    cmp_p.add_argument("--scenario", required=True, help="scenario for the Pure Pursuit run")
    cmp_p.add_argument(
        "--scenario-stanley",
        help="separate scenario for the Stanley run (must match except the controller)",
    )
    cmp_p.add_argument("--out", default="out", help="output directory (default: out)")
    cmp_p.add_argument("--seed", type=int, help="override both seeds")
    cmp_p.set_defaults(func=cmd_compare)

    an_p = sub.add_parser("analyze", help="recompute metrics.csv from a saved trace")
    an_p.add_argument("--scenario", required=True, help="scenario the trace was produced from")
    an_p.add_argument("--trace", help="trace file (default: <out>/trace.csv)")
    an_p.add_argument("--out", default="out", help="output directory (default: out)")
    an_p.set_defaults(func=cmd_analyze)

    srv_p = sub.add_parser("serve", help="host the realtime teleop session")
    srv_p.add_argument("--scenario", default="teleop", help="scenario to serve (default: teleop)")
    srv_p.add_argument("--host", default="127.0.0.1")
    srv_p.add_argument("--port", type=int, default=8700)
    srv_p.add_argument("--static", help="directory of cockpit assets to serve at /")
    srv_p.add_argument("--seed", type=int, help="override the scenario seed")
    srv_p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "port", 1) not in range(1, 65536):
        print("error: port must lie in [1, 65535]", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
