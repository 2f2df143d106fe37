"""Command-line interface: solve, oracle, validate, generate, bench.

Exit codes: 0 optimal (or valid), 1 input error or violation, 2 infeasible,
3 time or state limit.  ``DIDP_LOG`` sets the log level (e.g. ``INFO``).
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import benchmarks
from .benchmarks import InstanceFormatError, InvalidInstance
from .expr import EvalError, ExprTypeError
from .model import ModelError
from .oracle import BudgetExceeded, Oracle, Valid, validate_solution
from .parse import ParseError as ExprParseError
from .solver import INFEASIBLE, OPTIMAL, NegativeEdgeWeight, solve
from .yaml_io import GroundingError, ParseError, load_files

log = logging.getLogger("dypdl")

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_LIMIT = 0, 1, 2, 3
INPUT_ERRORS = (OSError, ParseError, GroundingError, ModelError, ExprParseError, ExprTypeError,
                EvalError, InstanceFormatError, InvalidInstance, ValueError)


def exit_code(status: str) -> int:
    if status == OPTIMAL:
        return EXIT_OK
    if status == INFEASIBLE:
        return EXIT_INFEASIBLE
    if status in ("TimeLimit", "MemoryLimit"):
        return EXIT_LIMIT
    return EXIT_INPUT


def jsonable(value):
    """Numbers as JSON: Fractions become "p/q" strings and infinities null."""
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else str(value)
    if isinstance(value, float) and math.isinf(value):
        return None
    return value


def emit(record: dict, fmt: str, human: str) -> None:
    if fmt == "jsonl":
        print(json.dumps({k: jsonable(v) for k, v in record.items()}, sort_keys=True))
    else:
        print(human)


def _fmt(value) -> str:
    if value is None:
        return "-"
    return str(jsonable(value))


# -- commands ----------------------------------------------------------------


def cmd_solve(args) -> int:
    model = load_files(args.domain, args.problem)
    sol = solve(model, time_limit=args.time_limit, max_generated=args.max_states)
    st = sol.stats
    record = {
        "event": "solution",
        "status": sol.status,
        "cost": sol.cost,
        "best_bound": sol.best_bound,
        "transitions": list(sol.transitions) if sol.transitions is not None else None,
        "algebra": sol.algebra,
        "expanded": st.expanded,
        "generated": st.generated,
        "pruned_by_dominance": st.pruned_by_dominance,
        "peak_registry_size": st.peak_registry_size,
        "wall_time": round(st.wall_time, 6),
    }
    lines = [f"{sol.status} {_fmt(sol.cost)}" if sol.status == OPTIMAL else sol.status,
             f"best bound: {_fmt(sol.best_bound)}"]
    if sol.transitions is not None:
        lines.append("transitions:")
        lines += [f"  {name}" for name in sol.transitions]
    lines.append(f"expanded {st.expanded}, generated {st.generated}, "
                 f"pruned {st.pruned_by_dominance}, time {st.wall_time:.3f}s")
    emit(record, args.format, "\n".join(lines))
    if args.output and sol.transitions is not None:
        Path(args.output).write_text("".join(f"{t}\n" for t in sol.transitions))
    return exit_code(sol.status)


def cmd_oracle(args) -> int:
    model = load_files(args.domain, args.problem)
    oracle = Oracle(model, max_states=args.max_states)
    try:
        res = oracle.solve()
    except BudgetExceeded as err:
        emit({"event": "oracle", "status": "MemoryLimit", "cost": None, "transitions": None},
             args.format, f"MemoryLimit ({err})")
        return EXIT_LIMIT
    status = OPTIMAL if res.feasible else INFEASIBLE
    record = {"event": "oracle", "status": status, "cost": res.value if res.feasible else None,
              "transitions": list(res.transitions) if res.transitions else [] if res.feasible else None,
              "states_visited": res.states_visited}
    human = f"{status} {_fmt(res.value)}" if res.feasible else status
    if res.transitions:
        human += "\ntransitions:\n" + "\n".join(f"  {t}" for t in res.transitions)
    emit(record, args.format, human)
    return exit_code(status)


def read_solution(path) -> list[str]:
    return [line.strip() for line in Path(path).read_text().splitlines() if line.strip()]


def cmd_validate(args) -> int:
    model = load_files(args.domain, args.problem)
    result = validate_solution(model, read_solution(args.solution))
    if isinstance(result, Valid):
        emit({"event": "validation", "valid": True, "cost": result.cost},
             args.format, f"Valid {_fmt(result.cost)}")
        return EXIT_OK
    emit({"event": "validation", "valid": False, "step": result.step, "reason": result.reason},
         args.format, f"Violation at step {result.step}: {result.reason}")
    return EXIT_INPUT


def _generate(name: str, n: int, seed: int, grid: str | None):
    mod = benchmarks.module(name)
    if grid:
        if name != "graph_clear":
            raise ValueError("--grid only applies to graph_clear")
        rows, cols = (int(x) for x in grid.lower().split("x"))
        return mod.generate_grid(rows, cols, seed)
    return mod.generate(n, seed)


def cmd_generate(args) -> int:
    inst = _generate(args.cls, args.n, args.seed, args.grid)
    mod = benchmarks.module(args.cls)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"{args.cls}-n{inst.n}-s{args.seed}"
    paths = {
        "instance": out / f"{stem}.txt",
        "domain": out / f"{args.cls}.domain.yaml",
        "problem": out / f"{stem}.problem.yaml",
    }
    paths["instance"].write_text(mod.write(inst))
    paths["domain"].write_text(benchmarks.domain_text(args.cls))
    paths["problem"].write_text(mod.problem_yaml(inst))
    emit({"event": "generated", **{k: str(v) for k, v in paths.items()}}, args.format,
         "\n".join(f"{k}: {v}" for k, v in paths.items()))
    return EXIT_OK


def bench_one(task):
    """Solve one ladder instance; module-level so worker processes can run it."""
    name, n, seed, time_limit, max_states = task
    inst = benchmarks.generate(name, n, seed)
    sol = solve(benchmarks.build(name, inst), time_limit=time_limit, max_generated=max_states)
    return {"event": "instance", "class": name, "n": n, "seed": seed, "status": sol.status,
            "cost": jsonable(sol.cost), "expanded": sol.stats.expanded,
            "generated": sol.stats.generated, "wall_time": round(sol.stats.wall_time, 6)}


def cmd_bench(args) -> int:
    sizes = args.sizes or [benchmarks.DESK_SIZES[benchmarks.module(args.cls).NAME]]
    tasks = [(args.cls, n, args.seed + k, args.time_limit, args.max_states)
             for n in sizes for k in range(args.count)]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(bench_one, tasks))
    else:
        rows = [bench_one(t) for t in tasks]
    for row in rows:
        log.info("%s n=%d seed=%d %s", row["class"], row["n"], row["seed"], row["status"])
        if args.format == "jsonl":
            emit(row, "jsonl", "")
    if args.format == "human":
        print(f"{'class':<12} {'n':>4} {'solved':>8} {'mean time (s)':>14} {'mean expanded':>14}")
    for n in sizes:
        group = [r for r in rows if r["n"] == n]
        solved = [r for r in group if r["status"] in (OPTIMAL, INFEASIBLE)]
        mean_t = statistics.fmean(r["wall_time"] for r in solved) if solved else None
        mean_e = statistics.fmean(r["expanded"] for r in solved) if solved else None
        summary = {"event": "summary", "class": args.cls, "n": n, "instances": len(group),
                   "solved": len(solved), "mean_time": mean_t, "mean_expanded": mean_e}
        emit(summary, args.format,
             f"{args.cls:<12} {n:>4} {len(solved):>4}/{len(group):<3} "
             f"{_fmt(None if mean_t is None else round(mean_t, 4)):>14} "
             f"{_fmt(None if mean_e is None else round(mean_e, 1)):>14}")
    return EXIT_OK


# -- entry point -------------------------------------------------------------


def positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def positive_int(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--time-limit", type=positive_float, default=1800.0,
                        help="seconds per solve (default 1800)")
    common.add_argument("--max-states", type=positive_int, default=10**7,
                        help="generated-state budget for solve, memo budget for oracle")
    common.add_argument("--format", choices=("human", "jsonl"), default="human")
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="dypdl", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="solve a YAML domain/problem pair")
    p.add_argument("domain")
    p.add_argument("problem")
    p.add_argument("-o", "--output", help="write the transition names to this solution file")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", parents=[common], help="exhaustive memoized recursion")
    p.add_argument("domain")
    p.add_argument("problem")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("validate", parents=[common], help="check a solution file")
    p.add_argument("domain")
    p.add_argument("problem")
    p.add_argument("solution", help="newline-separated transition names")
    p.set_defaults(func=cmd_validate)

    classes = list(benchmarks.CLASSES)
    p = sub.add_parser("generate", parents=[common], help="write a random instance and its YAML files")
    p.add_argument("cls", metavar="class", choices=classes)
    p.add_argument("-n", type=int, default=None, help="instance size (default: desk size)")
    p.add_argument("--grid", help="graph_clear only: planar grid ROWSxCOLS")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("bench", parents=[common], help="solve a seeded instance ladder")
    p.add_argument("cls", metavar="class", choices=classes)
    p.add_argument("--sizes", type=int, nargs="+", help="instance sizes (default: desk size)")
    p.add_argument("--count", type=positive_int, default=10, help="instances per size")
    p.add_argument("--jobs", type=positive_int, default=1)
    p.set_defaults(func=cmd_bench)
    return parser


def configure_logging() -> None:
    level = os.environ.get("DIDP_LOG", "WARNING").upper()
    numeric = int(level) if level.isdigit() else getattr(logging, level, logging.WARNING)
    logging.basicConfig(level=numeric, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s", force=True)


def main(argv=None) -> int:
    configure_logging()
    args = build_parser().parse_args(argv)
    if getattr(args, "n", 0) is None:
        args.n = benchmarks.DESK_SIZES[args.cls]
    try:
        return args.func(args)
    except NegativeEdgeWeight as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except INPUT_ERRORS as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
