"""Command-line entry point: ``uavvlc {run,gen,solve,check,oracle,defaults}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .experiment import (
    generate_scenario, load_config, run_experiment, save_config, save_results, spec_to_json,
    summarize,
)
from .files import ConfigError, load_scenario, load_solution, save_scenario, save_solution
from .planner import PlannerConfig, baseline_fixed_placement, exhaustive_solve, plan

log = logging.getLogger("uavvlc")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uavvlc", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute an experiment spec")
    run.add_argument("--config", default="default", help="spec file, or 'default' for the built-in defaults")
    run.add_argument("--out", help="output directory (overrides the spec's out_dir)")
    run.add_argument("--seed", type=int, nargs="+", help="override the spec's seed list")
    run.add_argument("--jobs", type=int, default=1, help="worker processes")
    run.add_argument("--solutions", action="store_true", help="also write every solution file")

    gen = sub.add_parser("gen", help="write a random scenario file")
    gen.add_argument("--config", default="default")
    gen.add_argument("--n", type=int, help="user count (default: the spec's n_users)")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)

    solve = sub.add_parser("solve", help="plan a scenario file and write the solution")
    solve.add_argument("scenario")
    solve.add_argument("--out", required=True)
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--baseline", action="store_true", help="keep the UAVs at the start placement")

    check = sub.add_parser("check", help="validate a solution file against every constraint")
    check.add_argument("solution")

    oracle = sub.add_parser("oracle", help="exhaustively solve a small scenario file")
    oracle.add_argument("scenario")
    oracle.add_argument("--out")

    defaults = sub.add_parser("defaults", help="print or write the default experiment spec")
    defaults.add_argument("--out")
    return parser


def _summary_line(result) -> str:
    return (
        f"objective={result.objective:.6f} sum_rate={result.sum_rate:.6f} "
        f"d2d={result.d2d_count} centroids={len(result.association.centroids)} "
        f"feasible={result.feasible}"
    )


def cmd_run(args) -> int:
    spec = load_config(args.config)
    if args.seed:
        spec = replace(spec, seeds=tuple(args.seed))
    out = Path(args.out or spec.out_dir)
    solutions = str(out / "solutions") if args.solutions else None
    records = run_experiment(spec, jobs=args.jobs, solutions_dir=solutions)
    summary = summarize(records)
    save_config(spec, out / "spec.json")
    paths = save_results(records, out, summary)
    for row in summary:
        print(
            f"{row['point'] or '-':>22} {row['method']:>8}  objective={row['objective_mean']:.3f}"
            f"  sum_rate={row['sum_rate_mean']:.3f}  d2d={row['d2d_count_mean']:.2f}"
            f"  feasible={row['feasible']}/{row['runs']}  min_margin={row['min_margin_min']:.3f} lux"
        )
    print(f"wrote {', '.join(str(p) for p in paths.values())}")
    failed = sum(1 for r in records if r.error)
    if failed:
        print(f"{failed} run(s) failed; see {paths['records']}", file=sys.stderr)
        return 1
    return 0


def cmd_gen(args) -> int:
    spec = load_config(args.config)
    scenario = generate_scenario(
        spec.params, spec.n_users if args.n is None else args.n, args.seed, spec.start)
    save_scenario(scenario, args.out)
    print(f"wrote {args.out} ({len(scenario)} users, seed {args.seed})")
    return 0


def cmd_solve(args) -> int:
    scenario = load_scenario(args.scenario)
    solver = baseline_fixed_placement if args.baseline else plan
    result = solver(scenario, PlannerConfig(seed=args.seed))
    save_solution(scenario, result, args.out)
    print(_summary_line(result))
    return 0


def cmd_check(args) -> int:
    _, result, stored = load_solution(args.solution)
    for v in result.violations:
        print(f"{v.constraint} violation: users {list(v.indices)} value={v.value:g} bound={v.bound:g}")
    if "feasible" in stored and stored["feasible"] != result.feasible:
        print(f"stored feasible flag {stored['feasible']} disagrees with the check", file=sys.stderr)
    print(_summary_line(result))
    return 0 if result.feasible else 1


def cmd_oracle(args) -> int:
    scenario = load_scenario(args.scenario)
    result = exhaustive_solve(scenario)
    if args.out:
        save_solution(scenario, result, args.out)
    print(_summary_line(result))
    return 0


def cmd_defaults(args) -> int:
    spec = load_config("default")
    if args.out:
        save_config(spec, args.out)
    else:
        print(json.dumps(spec_to_json(spec), indent=2))
    return 0


COMMANDS = {
    "run": cmd_run, "gen": cmd_gen, "solve": cmd_solve, "check": cmd_check,
    "oracle": cmd_oracle, "defaults": cmd_defaults,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ValueError) as err:
        print(f"uavvlc {args.command}: error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"uavvlc {args.command}: I/O error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
