"""Solve a seeded size ladder for every class and print a solved / mean-time table.

    python scripts/bench_ladder.py --count 10 --time-limit 60
"""

import argparse
import statistics

from dypdl import solve
from dypdl.benchmarks import CLASSES, build, generate

LADDERS = {
    "tsptw": [6, 9, 12, 15],
    "cvrp": [5, 7, 9],
    "salbp1": [10, 15, 20],
    "bin_packing": [10, 15, 20],
    "mosp": [6, 8, 10, 12],
    "graph_clear": [6, 8, 10, 12],
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--time-limit", type=float, default=30.0)
    ap.add_argument("--classes", nargs="+", default=list(CLASSES))
    args = ap.parse_args()

    print(f"{'class':<12} {'n':>3} {'solved':>7} {'mean s':>8} {'mean expanded':>14}")
    for name in args.classes:
        for n in LADDERS[name]:
            done = []
            for k in range(args.count):
                sol = solve(build(name, generate(name, n, args.seed + k)), time_limit=args.time_limit)
                if sol.status in ("Optimal", "Infeasible"):
                    done.append(sol.stats)
            mean_t = statistics.fmean(s.wall_time for s in done) if done else float("nan")
            mean_e = statistics.fmean(s.expanded for s in done) if done else float("nan")
            print(f"{name:<12} {n:>3} {len(done):>3}/{args.count:<3} {mean_t:>8.3f} {mean_e:>14.1f}")


if __name__ == "__main__":
    main()
