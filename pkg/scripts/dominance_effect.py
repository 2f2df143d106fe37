"""Expansions with and without dominance pruning on the resource-variable classes.

    python scripts/dominance_effect.py --n 8 --count 20
"""

import argparse

from dypdl import solve
from dypdl.benchmarks import build, generate


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=8)
    ap.add_argument("--count", type=int, default=20)
    args = ap.parse_args()

    print(f"{'class':<12} {'expanded (on)':>14} {'expanded (off)':>15} {'ratio':>6}")
    for name in ("tsptw", "cvrp", "salbp1", "bin_packing"):
        on = off = 0
        for seed in range(args.count):
            m = build(name, generate(name, args.n, seed))
            a, b = solve(m), solve(m, dominance=False)
            assert a.cost == b.cost, (name, seed)
            on += a.stats.expanded
            off += b.stats.expanded
        print(f"{name:<12} {on:>14} {off:>15} {off / max(on, 1):>6.2f}")


if __name__ == "__main__":
    main()
