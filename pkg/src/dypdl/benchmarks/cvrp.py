"""Capacitated vehicle routing, giant-tour formulation.

Text format::

    n m q               # customers (depot excluded), vehicles, capacity
    d[0] ... d[n]       # demands, d[0] = 0 for the depot
    c[0][0] ... c[0][n] # n+1 rows of travel times
    ...
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import yaml

from ..model import Model
from ._text import InvalidInstance, Lines, matrix_text

NAME = "cvrp"


@dataclass(frozen=True)
class Instance:
    c: tuple[tuple[int, ...], ...]
    d: tuple[int, ...]
    q: int
    m: int

    @property
    def n(self) -> int:
        return len(self.d) - 1

    def via_depot(self) -> list[list[int]]:
        size = self.n + 1
        return [[self.c[i][0] + self.c[0][j] for j in range(size)] for i in range(size)]

    def check(self) -> None:
        size = len(self.d)
        if size < 1 or len(self.c) != size or any(len(r) != size for r in self.c):
            raise InvalidInstance("inconsistent sizes")
        if self.m < 1:
            raise InvalidInstance("need at least one vehicle")
        if self.q < 0 or any(x < 0 for x in self.d) or any(x < 0 for r in self.c for x in r):
            raise InvalidInstance("negative capacity, demand or travel time")
        if self.c != tuple(zip(*self.c)):
            raise InvalidInstance("travel times must be symmetric")


def build(inst: Instance) -> Model:
    inst.check()
    size = inst.n + 1
    model = Model("min", "integer", name=NAME)
    model.add_object_type("customer", size)
    model.add_variable("U", "set", range(1, size), object="customer")
    model.add_variable("i", "element", 0, object="customer")
    model.add_variable("l", "integer", 0, preference="less")
    model.add_variable("k", "integer", 1, preference="less")
    model.add_table("q", "integer", inst.q)
    model.add_table("m", "integer", inst.m)
    model.add_table("d", "integer", list(inst.d), args=["customer"])
    model.add_table("c", "integer", [list(r) for r in inst.c], args=["customer", "customer"])
    model.add_table("cprime", "integer", inst.via_depot(), args=["customer", "customer"])
    model.add_base_case(["(is_empty U)", "(= i 0)"])
    for j in range(1, size):
        model.add_transition(
            f"visit {j}",
            effects={"U": f"(remove {j} U)", "i": f"{j}", "l": f"(+ l (d {j}))"},
            cost=f"(+ (c i {j}) cost)",
            preconditions=[f"(is_in {j} U)", f"(<= (+ l (d {j})) q)"],
            parameters=[("j", j)],
        )
    for j in range(1, size):
        model.add_transition(
            f"visit-via-depot {j}",
            effects={"U": f"(remove {j} U)", "i": f"{j}", "l": f"(d {j})", "k": "(+ k 1)"},
            cost=f"(+ (cprime i {j}) cost)",
            preconditions=[f"(is_in {j} U)", "(< k m)", f"(<= (d {j}) q)"],
            parameters=[("j", j)],
        )
    model.add_transition(
        "return",
        effects={"i": "0"},
        cost="(+ (c i 0) cost)",
        preconditions=["(is_empty U)", "(!= i 0)"],
    )
    model.add_dual_bound("0")
    return model


def generate(n: int, seed: int, m: int | None = None, grid: int = 50) -> Instance:
    rng = random.Random(seed)
    points = [(rng.randint(0, grid), rng.randint(0, grid)) for _ in range(n + 1)]
    c = tuple(tuple(round(math.dist(p, q)) for q in points) for p in points)
    d = (0,) + tuple(rng.randint(1, 10) for _ in range(n))
    total = sum(d)
    if m is None:
        m = rng.randint(1, max(1, (n + 1) // 2))
    q = max(max(d), math.ceil(total / m) + rng.randint(0, 6))
    return Instance(c, d, q, m)


def read(text: str) -> Instance:
    lines = Lines(text)
    n, m, q = lines.next(3, "header fields (n m q)")
    size = n + 1
    d = tuple(lines.next(size, "demands"))
    c = tuple(tuple(lines.next(size, "travel times")) for _ in range(size))
    lines.finish()
    inst = Instance(c, d, q, m)
    inst.check()
    return inst


def write(inst: Instance) -> str:
    return f"{inst.n} {inst.m} {inst.q}\n{' '.join(map(str, inst.d))}\n{matrix_text(inst.c)}\n"


def problem_yaml(inst: Instance) -> str:
    size = inst.n + 1
    data = {
        "object_numbers": {"customer": size},
        "target": {"U": list(range(1, size)), "i": 0, "l": 0, "k": 1},
        "table_values": {
            "q": inst.q,
            "m": inst.m,
            "d": list(inst.d),
            "c": [list(r) for r in inst.c],
            "cprime": inst.via_depot(),
        },
    }
    return yaml.safe_dump(data, sort_keys=False, default_flow_style=None, width=100)
