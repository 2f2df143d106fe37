"""Traveling salesperson with time windows.

Locations are ``0..n`` with 0 the depot.  Text format::

    n                    # number of customers (depot excluded)
    c[0][0] ... c[0][n]  # n+1 rows of travel times
    ...
    a[0] b[0]            # n+1 lines of time windows
    ...
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import yaml

from ..model import Model
from ._text import InstanceFormatError, InvalidInstance, Lines, matrix_text

NAME = "tsptw"


@dataclass(frozen=True)
class Instance:
    c: tuple[tuple[int, ...], ...]
    a: tuple[int, ...]
    b: tuple[int, ...]

    @property
    def n(self) -> int:
        """Number of customers."""
        return len(self.a) - 1

    def shortest(self) -> list[list[int]]:
        """All-pairs shortest travel times (Floyd-Warshall)."""
        size = len(self.a)
        d = [list(row) for row in self.c]
        for k in range(size):
            dk = d[k]
            for i in range(size):
                dik = d[i][k]
                row = d[i]
                for j in range(size):
                    if dik + dk[j] < row[j]:
                        row[j] = dik + dk[j]
        return d

    @property
    def triangle_inequality(self) -> bool:
        return [list(r) for r in self.c] == self.shortest()

    def check(self) -> None:
        size = len(self.a)
        if size < 1 or len(self.b) != size or len(self.c) != size:
            raise InvalidInstance("inconsistent sizes")
        if any(len(row) != size for row in self.c):
            raise InvalidInstance("travel-time matrix is not square")
        if any(x < 0 for row in self.c for x in row):
            raise InvalidInstance("negative travel time")
        if any(lo > hi for lo, hi in zip(self.a, self.b)):
            raise InvalidInstance("empty time window")


def build(inst: Instance) -> Model:
    inst.check()
    size = inst.n + 1
    model = Model("min", "integer", name=NAME)
    model.add_object_type("customer", size)
    model.add_variable("U", "set", range(1, size), object="customer")
    model.add_variable("i", "element", 0, object="customer")
    model.add_variable("t", "integer", 0, preference="less")
    model.add_table("a", "integer", list(inst.a), args=["customer"])
    model.add_table("b", "integer", list(inst.b), args=["customer"])
    model.add_table("c", "integer", [list(r) for r in inst.c], args=["customer", "customer"])
    if inst.triangle_inequality:
        nearest = "c"
    else:
        model.add_table("cstar", "integer", inst.shortest(), args=["customer", "customer"])
        nearest = "cstar"
    model.add_constraint(f"(forall (j U) (<= (+ t ({nearest} i j)) (b j)))")
    model.add_base_case(["(is_empty U)", "(= i 0)"])
    for j in range(1, size):
        model.add_transition(
            f"visit {j}",
            effects={"U": f"(remove {j} U)", "i": f"{j}", "t": f"(max (+ t (c i {j})) (a {j}))"},
            cost=f"(+ (c i {j}) cost)",
            preconditions=[f"(is_in {j} U)", f"(<= (+ t (c i {j})) (b {j}))"],
            parameters=[("j", j)],
        )
    model.add_transition(
        "return",
        effects={"i": "0", "t": "(+ t (c i 0))"},
        cost="(+ (c i 0) cost)",
        preconditions=["(is_empty U)", "(!= i 0)"],
    )
    model.add_dual_bound("0")
    return model


def generate(n: int, seed: int, grid: int = 50, width: int = 150) -> Instance:
    """Random Euclidean instance whose windows contain a random tour's arrival times."""
    rng = random.Random(seed)
    points = [(rng.randint(0, grid), rng.randint(0, grid)) for _ in range(n + 1)]
    c = tuple(tuple(round(math.dist(p, q)) for q in points) for p in points)
    order = list(range(1, n + 1))
    rng.shuffle(order)
    a = [0] * (n + 1)
    b = [0] * (n + 1)
    t, prev = 0, 0
    for j in order:
        t += c[prev][j]
        a[j] = max(0, t - rng.randint(0, width))
        b[j] = t + rng.randint(0, width)
        prev = j
    t += c[prev][0]
    b[0] = t + width * (n + 1)
    return Instance(c, tuple(a), tuple(b))


def read(text: str) -> Instance:
    lines = Lines(text)
    (n,) = lines.next(1, "customer count")
    size = n + 1
    c = tuple(tuple(lines.next(size, "travel times")) for _ in range(size))
    windows = [lines.next(2, "time window bounds") for _ in range(size)]
    lines.finish()
    inst = Instance(c, tuple(w[0] for w in windows), tuple(w[1] for w in windows))
    inst.check()
    return inst


def write(inst: Instance) -> str:
    windows = "\n".join(f"{lo} {hi}" for lo, hi in zip(inst.a, inst.b))
    return f"{inst.n}\n{matrix_text(inst.c)}\n{windows}\n"


def problem_yaml(inst: Instance) -> str:
    size = inst.n + 1
    data = {
        "object_numbers": {"customer": size},
        "target": {"U": list(range(1, size)), "i": 0, "t": 0},
        "table_values": {
            "a": list(inst.a),
            "b": list(inst.b),
            "c": [list(r) for r in inst.c],
            "cstar": inst.shortest(),
        },
    }
    return yaml.safe_dump(data, sort_keys=False, default_flow_style=None, width=100)


def brute_force(inst: Instance):
    """Optimal tour cost by enumerating permutations, or ``None`` if infeasible."""
    from itertools import permutations

    best = None
    for perm in permutations(range(1, inst.n + 1)):
        t, cost, prev, ok = 0, 0, 0, True
        for j in perm:
            t += inst.c[prev][j]
            if t > inst.b[j]:
                ok = False
                break
            t = max(t, inst.a[j])
            cost += inst.c[prev][j]
            prev = j
        if ok:
            cost += inst.c[prev][0]
            if best is None or cost < best:
                best = cost
    return best


def read_dumas(text: str) -> Instance:
    """Dumas-style file: node count including the depot, the matrix, then one window per line.

    Travel times must be integral; trailing columns after a window pair are ignored.
    """
    tokens = Lines(text)
    (size,) = tokens.next(1, "node count")
    c = tuple(tuple(tokens.next(size, "travel times")) for _ in range(size))
    windows = []
    for _ in range(size):
        no = tokens.line_no()
        row = tokens.next(None, "time window")
        if len(row) < 2:
            raise InstanceFormatError(no, "time window needs two values")
        windows.append(row[:2])
    tokens.finish()
    inst = Instance(c, tuple(w[0] for w in windows), tuple(w[1] for w in windows))
    inst.check()
    return inst
