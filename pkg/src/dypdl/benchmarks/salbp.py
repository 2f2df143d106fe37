"""Simple assembly line balancing, type 1 (minimize stations).

Tasks are ``0..n-1``.  Text format::

    n c m           # tasks, cycle time, number of precedence pairs
    t[0] ... t[n-1]
    i j             # m lines: task i must precede task j
    ...

The station lower bounds here are shared with bin packing.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

import yaml

from ..model import Model
from ._text import InstanceFormatError, InvalidInstance, Lines

NAME = "salbp1"


@dataclass(frozen=True)
class Instance:
    t: tuple[int, ...]
    c: int
    pred: tuple[frozenset, ...]

    @property
    def n(self) -> int:
        return len(self.t)

    def edges(self) -> list[tuple[int, int]]:
        return sorted((i, j) for j, ps in enumerate(self.pred) for i in ps)

    def check(self) -> None:
        if len(self.pred) != self.n:
            raise InvalidInstance("inconsistent sizes")
        if self.c < 0 or any(x < 0 for x in self.t):
            raise InvalidInstance("negative cycle time or task time")
        if any(not 0 <= i < self.n for ps in self.pred for i in ps):
            raise InvalidInstance("predecessor index out of range")
        # Kahn's algorithm
        indeg = [len(ps) for ps in self.pred]
        succ = [[] for _ in range(self.n)]
        for i, j in self.edges():
            succ[i].append(j)
        ready = [j for j in range(self.n) if indeg[j] == 0]
        seen = 0
        while ready:
            i = ready.pop()
            seen += 1
            for j in succ[i]:
                indeg[j] -= 1
                if indeg[j] == 0:
                    ready.append(j)
        if seen != self.n:
            raise InvalidInstance("cyclic precedence")


def weights(t: list[int] | tuple[int, ...], c: int):
    """Per-item weights (w2, w2', w3) of the three station lower bounds."""
    w2 = [1 if 2 * x > c else 0 for x in t]
    w2p = [Fraction(1, 2) if 2 * x == c else 0 for x in t]
    w3 = []
    for x in t:
        if 3 * x > 2 * c:
            w3.append(1)
        elif 3 * x == 2 * c:
            w3.append(Fraction(2, 3))
        elif 3 * x > c:
            w3.append(Fraction(1, 2))
        elif 3 * x == c:
            w3.append(Fraction(1, 3))
        else:
            w3.append(0)
    return w2, w2p, w3


def add_station_bounds(model: Model, t, c: int, obj: str, U: str = "U", r: str = "r") -> None:
    """Declare weight tables and the max{LB1, LB2, LB3} dual bound."""
    w2, w2p, w3 = weights(t, c)
    model.add_table("w2", "integer", w2, args=[obj])
    model.add_table("w2p", "continuous", w2p, args=[obj])
    model.add_table("w3", "continuous", w3, args=[obj])
    model.add_dual_bound(f"(ceil (/ (- (sum t {U}) {r}) c))")
    model.add_dual_bound(
        f"(- (+ (sum w2 {U}) (ceil (sum w2p {U}))) (if (>= {r} (/ c 2)) 1 0))"
    )
    model.add_dual_bound(f"(- (ceil (sum w3 {U})) (if (>= {r} (/ c 3)) 1 0))")


def build(inst: Instance) -> Model:
    inst.check()
    n = inst.n
    model = Model("min", "integer", name=NAME)
    model.add_object_type("task", n)
    model.add_variable("U", "set", range(n), object="task")
    model.add_variable("r", "integer", 0, preference="more")
    model.add_table("c", "integer", inst.c)
    model.add_table("t", "integer", list(inst.t), args=["task"])
    model.add_table("P", "set", [sorted(p) for p in inst.pred], args=["task"], object="task")
    model.add_base_case(["(is_empty U)"])
    for i in range(n):
        model.add_transition(
            f"assign {i}",
            effects={"U": f"(remove {i} U)", "r": f"(- r (t {i}))"},
            cost="cost",
            preconditions=[f"(is_in {i} U)", f"(is_empty (intersection (P {i}) U))",
                           f"(>= r (t {i}))"],
            parameters=[("i", i)],
        )
    # maximal load pruning: open a station only when no remaining task fits
    model.add_transition(
        "open-station",
        effects={"r": "c"},
        cost="(+ 1 cost)",
        preconditions=["(forall (i U) (or (not (is_empty (intersection (P i) U))) (> (t i) r)))"],
        forced=True,
    )
    add_station_bounds(model, inst.t, inst.c, "task")
    return model


def generate(n: int, seed: int, density: float = 0.3, c: int = 12) -> Instance:
    rng = random.Random(seed)
    t = tuple(rng.randint(1, c) for _ in range(n))
    pred = tuple(frozenset(i for i in range(j) if rng.random() < density) for j in range(n))
    return Instance(t, c, pred)


def read(text: str) -> Instance:
    lines = Lines(text)
    n, c, m = lines.next(3, "header fields (n c m)")
    t = tuple(lines.next(n, "task times"))
    pred = [set() for _ in range(n)]
    for _ in range(m):
        no = lines.line_no()
        i, j = lines.next(2, "precedence pair")
        if not (0 <= i < n and 0 <= j < n):
            raise InstanceFormatError(no, f"task index out of range in pair {i} {j}")
        pred[j].add(i)
    lines.finish()
    inst = Instance(t, c, tuple(frozenset(p) for p in pred))
    inst.check()
    return inst


def write(inst: Instance) -> str:
    edges = inst.edges()
    body = "".join(f"{i} {j}\n" for i, j in edges)
    return f"{inst.n} {inst.c} {len(edges)}\n{' '.join(map(str, inst.t))}\n{body}"


def _fractions(values) -> list:
    return [str(v) if isinstance(v, Fraction) else v for v in values]


def problem_yaml(inst: Instance) -> str:
    w2, w2p, w3 = weights(inst.t, inst.c)
    data = {
        "object_numbers": {"task": inst.n},
        "target": {"U": list(range(inst.n)), "r": 0},
        "table_values": {
            "c": inst.c,
            "t": list(inst.t),
            "P": [sorted(p) for p in inst.pred],
            "w2": w2,
            "w2p": _fractions(w2p),
            "w3": _fractions(w3),
        },
    }
    return yaml.safe_dump(data, sort_keys=False, default_flow_style=None, width=100)
