"""Command-line front end: batch runs, comparisons, replay checks, live server."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .experiment import (
    compare,
    load_summary_csv,
    run_experiment,
    verify_replay,
)
from .graph import METHODS
from .scenario import (
    ScenarioError,
    generate_scenario,
    load_scenario,
    save_scenario,
)
from .trace import Trace

EXIT_OK = 0
EXIT_USAGE = 2


def parse_seeds(text: str) -> list[int]:
    """Either 'a..b' (inclusive) or a comma list."""
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(s) for s in text.split(",") if s]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="beliefgraph",
                                description="Belief-space inspection experiments")
    sub = p.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a method over seeds, write traces + CSVs")
    run_p.add_argument("--scenario", required=True)
    run_p.add_argument("--method", required=True, choices=METHODS)
    run_p.add_argument("--seeds", required=True, help="e.g. 1..5 or 1,2,3")
    run_p.add_argument("--budget", type=float, default=None, help="override budget (s)")
    run_p.add_argument("--out", required=True)

    cmp_p = sub.add_parser("compare", help="paired comparison of summary CSVs")
    cmp_p.add_argument("--in", dest="inputs", nargs="+", required=True,
                       help="two or more summary_<method>.csv files")

    rep_p = sub.add_parser("replay", help="re-drive a trace's control log and verify")
    rep_p.add_argument("--trace", required=True)

    gen_p = sub.add_parser("gen-scenario", help="instantiate a generator template")
    gen_p.add_argument("--template", required=True)
    gen_p.add_argument("--seed", type=int, required=True)
    gen_p.add_argument("--out", required=True)

    srv_p = sub.add_parser("serve", help="run the live simulator server")
    srv_p.add_argument("--scenario", required=True)
    srv_p.add_argument("--mode", choices=("teleop", "autonomous"), default="teleop")
    srv_p.add_argument("--port", type=int, default=8750)
    srv_p.add_argument("--budget", type=float, default=None)
    srv_p.add_argument("--pace", choices=("realtime", "fast"), default="realtime")
    return p


def cmd_run(args) -> int:
    scenario = load_scenario(args.scenario)
    seeds = parse_seeds(args.seeds)
    rows = run_experiment(scenario, args.method, seeds, args.out, budget=args.budget)
    for row in rows:
        print(f"seed {row['seed']}: inspected {row['inspected_final']}, "
              f"reward-cost {row['reward_cost']:.1f}, terminal {row['terminal']}")
    print(f"wrote {len(rows)} traces and summary_{args.method}.csv to {args.out}")
    return EXIT_OK


def _resolve_summaries(inputs: list[str]) -> list[Path]:
    paths: list[Path] = []
    for raw in inputs:
        p = Path(raw)
        if p.is_dir():
            found = sorted(p.glob("summary_*.csv"))
            if not found:
                raise FileNotFoundError(f"no summary_*.csv in {p}")
            paths.extend(found)
        else:
            paths.append(p)
    return paths


def cmd_compare(args) -> int:
    paths = _resolve_summaries(args.inputs)
    if len(paths) < 2:
        print("compare needs at least two summaries", file=sys.stderr)
        return EXIT_USAGE
    summaries = [load_summary_csv(p) for p in paths]
    for i in range(len(summaries)):
        for j in range(i + 1, len(summaries)):
            print(compare(summaries[i], summaries[j]).as_text())
    return EXIT_OK


def cmd_replay(args) -> int:
    trace = Trace.read(args.trace)
    ok, original, replayed = verify_replay(trace)
    if ok:
        print(f"replay ok: world hash {original}")
        return EXIT_OK
    print(f"replay MISMATCH: {original} != {replayed}", file=sys.stderr)
    return 1


def cmd_gen(args) -> int:
    template = load_scenario(args.template)
    scenario = generate_scenario(template, args.seed)
    save_scenario(scenario, args.out)
    print(f"wrote {args.out} with {len(scenario.objects)} objects")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .server import build_app

    scenario = load_scenario(args.scenario)
    budget = args.budget
    if budget is None and args.mode == "teleop":
        budget = 300.0  # human sessions default to five minutes
    if budget is not None:
        d = scenario.to_dict()
        d["budget_s"] = budget
        from .scenario import WorldScenario
        scenario = WorldScenario.from_dict(d)
    ui_dir = Path(__file__).resolve().parents[2] / "frontend"
    app = build_app(scenario, mode=args.mode, pace=args.pace,
                    ui_dir=str(ui_dir) if (ui_dir / "dist").exists() else None)
    print(f"serving on ws://127.0.0.1:{args.port}/ws "
          f"(browser UI at http://127.0.0.1:{args.port}/ui/ when built)")
    uvicorn.run(app, host="127.0.0.1", port=args.port, log_level="warning")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "compare":
            return cmd_compare(args)
        if args.command == "replay":
            return cmd_replay(args)
        if args.command == "gen-scenario":
            return cmd_gen(args)
        if args.command == "serve":
            return cmd_serve(args)
    except (ScenarioError, ValueError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
