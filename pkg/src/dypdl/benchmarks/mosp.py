"""Minimization of open stacks.

Customers are ``0..n-1`` and products ``0..p-1``.  Text format::

    n p             # customers, products
    k j1 ... jk     # n lines: number of products ordered, then product ids
    ...
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import yaml

from ..model import Model
from ._text import InstanceFormatError, InvalidInstance, Lines

NAME = "mosp"


@dataclass(frozen=True)
class Instance:
    orders: tuple[frozenset, ...]
    products: int

    @property
    def n(self) -> int:
        return len(self.orders)

    def neighbors(self) -> list[list[int]]:
        """N_c: customers sharing a product with c (c included when it orders anything)."""
        return [[d for d in range(self.n) if self.orders[c] & self.orders[d]] for c in range(self.n)]

    def check(self) -> None:
        if self.products < 0:
            raise InvalidInstance("negative product count")
        if any(not 0 <= j < self.products for o in self.orders for j in o):
            raise InvalidInstance("product index out of range")


def build(inst: Instance) -> Model:
    inst.check()
    n = inst.n
    model = Model("min", "integer", name=NAME)
    model.add_object_type("customer", n)
    model.add_variable("R", "set", range(n), object="customer")
    model.add_variable("O", "set", [], object="customer")
    model.add_table("N", "set", inst.neighbors(), args=["customer"], object="customer")
    model.add_base_case(["(is_empty R)"])
    for c in range(n):
        model.add_transition(
            f"close {c}",
            effects={"R": f"(remove {c} R)", "O": f"(union O (N {c}))"},
            cost=f"(max cost (card (union (intersection O R) (difference (N {c}) O))))",
            preconditions=[f"(is_in {c} R)"],
            parameters=[("c", c)],
        )
    model.add_dual_bound("0")
    return model


def generate(n: int, seed: int, products: int | None = None, density: float = 0.3) -> Instance:
    """Every customer orders at least one product."""
    rng = random.Random(seed)
    p = n if products is None else products
    orders = []
    for _ in range(n):
        chosen = {j for j in range(p) if rng.random() < density}
        if not chosen and p:
            chosen.add(rng.randrange(p))
        orders.append(frozenset(chosen))
    return Instance(tuple(orders), p)


def read(text: str) -> Instance:
    lines = Lines(text)
    n, p = lines.next(2, "header fields (n p)")
    orders = []
    for _ in range(n):
        no = lines.line_no()
        row = lines.next(None, "order list")
        if not row or row[0] != len(row) - 1:
            raise InstanceFormatError(no, "order list length does not match its count")
        if any(not 0 <= j < p for j in row[1:]):
            raise InstanceFormatError(no, "product index out of range")
        orders.append(frozenset(row[1:]))
    lines.finish()
    return Instance(tuple(orders), p)


def write(inst: Instance) -> str:
    rows = "".join(" ".join(map(str, [len(o), *sorted(o)])) + "\n" for o in inst.orders)
    return f"{inst.n} {inst.products}\n{rows}"


def problem_yaml(inst: Instance) -> str:
    data = {
        "object_numbers": {"customer": inst.n},
        "target": {"R": list(range(inst.n)), "O": []},
        "table_values": {"N": inst.neighbors()},
    }
    return yaml.safe_dump(data, sort_keys=False, default_flow_style=None, width=100)
