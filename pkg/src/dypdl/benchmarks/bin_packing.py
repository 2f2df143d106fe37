"""One-dimensional bin packing.

Items are ``0..n-1``.  Text format::

    n c             # items, bin capacity
    t[0] ... t[n-1]
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import yaml

from ..model import Model
from ._text import InvalidInstance, Lines
from .salbp import _fractions, add_station_bounds, weights

NAME = "bin_packing"


@dataclass(frozen=True)
class Instance:
    t: tuple[int, ...]
    c: int

    @property
    def n(self) -> int:
        return len(self.t)

    def check(self) -> None:
        if self.c < 0 or any(x < 0 for x in self.t):
            raise InvalidInstance("negative capacity or item size")


def build(inst: Instance, symmetry_breaking: bool = True) -> Model:
    """Model with bins numbered in opening order; ``k`` counts opened bins.

    With ``symmetry_breaking`` off, the ``i + 1 >= k`` rule and the forced
    choice of the smallest unpacked item are dropped.
    """
    inst.check()
    n = inst.n
    model = Model("min", "integer", name=NAME)
    model.add_object_type("item", n)
    model.add_object_type("bin", n + 1)
    model.add_variable("U", "set", range(n), object="item")
    model.add_variable("r", "integer", 0, preference="more")
    model.add_variable("k", "element", 0, object="bin", preference="less")
    model.add_table("c", "integer", inst.c)
    model.add_table("t", "integer", list(inst.t), args=["item"])
    model.add_base_case(["(is_empty U)"])
    for i in range(n):
        pre = [f"(is_in {i} U)", f"(>= r (t {i}))"]
        if symmetry_breaking:
            pre.append(f"(>= (+ {i} 1) k)")
        model.add_transition(
            f"pack {i}",
            effects={"U": f"(remove {i} U)", "r": f"(- r (t {i}))"},
            cost="cost",
            preconditions=pre,
            parameters=[("i", i)],
        )
    for i in range(n):
        if symmetry_breaking:
            pre = ["(forall (j U) (or (< r (t j)) (< (+ j 1) k)))", f"(is_in {i} U)", f"(>= {i} k)"]
        else:
            pre = ["(forall (j U) (< r (t j)))", f"(is_in {i} U)"]
        model.add_transition(
            f"open {i}",
            effects={"U": f"(remove {i} U)", "r": f"(- c (t {i}))", "k": "(+ k 1)"},
            cost="(+ 1 cost)",
            preconditions=pre,
            forced=symmetry_breaking,
            parameters=[("i", i)],
        )
    add_station_bounds(model, inst.t, inst.c, "item")
    return model


def generate(n: int, seed: int, c: int = 12) -> Instance:
    rng = random.Random(seed)
    return Instance(tuple(rng.randint(1, c) for _ in range(n)), c)


def read(text: str) -> Instance:
    lines = Lines(text)
    n, c = lines.next(2, "header fields (n c)")
    t = tuple(lines.next(n, "item sizes"))
    lines.finish()
    inst = Instance(t, c)
    inst.check()
    return inst


def write(inst: Instance) -> str:
    return f"{inst.n} {inst.c}\n{' '.join(map(str, inst.t))}\n"


def problem_yaml(inst: Instance) -> str:
    w2, w2p, w3 = weights(inst.t, inst.c)
    data = {
        "object_numbers": {"item": inst.n, "bin": inst.n + 1},
        "target": {"U": list(range(inst.n)), "r": 0, "k": 0},
        "table_values": {
            "c": inst.c,
            "t": list(inst.t),
            "w2": w2,
            "w2p": _fractions(w2p),
            "w3": _fractions(w3),
        },
    }
    return yaml.safe_dump(data, sort_keys=False, default_flow_style=None, width=100)
