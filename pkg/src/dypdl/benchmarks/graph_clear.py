"""Graph-clear: sweep every node with the fewest robots at any time.

Nodes are ``0..n-1``.  Text format::

    n m             # nodes, edges
    a[0] ... a[n-1] # node weights
    i j b           # m lines: undirected edge {i, j} with weight b
    ...
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import yaml

from ..model import Model
from ._text import InstanceFormatError, InvalidInstance, Lines

NAME = "graph_clear"


@dataclass(frozen=True)
class Instance:
    a: tuple[int, ...]
    edges: tuple[tuple[int, int, int], ...]  # (i, j, b) with i < j

    @property
    def n(self) -> int:
        return len(self.a)

    def matrix(self) -> list[list[int]]:
        b = [[0] * self.n for _ in range(self.n)]
        for i, j, w in self.edges:
            b[i][j] = b[j][i] = w
        return b

    def check(self) -> None:
        if any(x < 0 for x in self.a) or any(w < 0 for _, _, w in self.edges):
            raise InvalidInstance("negative weight")
        seen = set()
        for i, j, _ in self.edges:
            if not (0 <= i < j < self.n):
                raise InvalidInstance(f"bad edge ({i}, {j})")
            if (i, j) in seen:
                raise InvalidInstance(f"duplicate edge ({i}, {j})")
            seen.add((i, j))


def build(inst: Instance) -> Model:
    inst.check()
    n = inst.n
    model = Model("min", "integer", name=NAME)
    model.add_object_type("node", n)
    model.add_variable("C", "set", [], object="node")
    model.add_table("N", "set", range(n), object="node")
    model.add_table("a", "integer", list(inst.a), args=["node"])
    model.add_table("b", "integer", {(i, j): w for i, j, w in inst.edges}
                    | {(j, i): w for i, j, w in inst.edges},
                    args=["node", "node"], default=0)
    model.add_base_case(["(= C N)"])
    for c in range(n):
        model.add_transition(
            f"sweep {c}",
            effects={"C": f"(add {c} C)"},
            cost=f"(max cost (+ (+ (a {c}) (sum b {c} N)) (sum b C (remove {c} ~C))))",
            preconditions=[f"(not (is_in {c} C))"],
            parameters=[("c", c)],
        )
    model.add_dual_bound("0")
    return model


def generate(n: int, seed: int, density: float = 0.4, max_weight: int = 10) -> Instance:
    """Random graph with uniform edge probability."""
    rng = random.Random(seed)
    a = tuple(rng.randint(1, max_weight) for _ in range(n))
    edges = tuple((i, j, rng.randint(1, max_weight))
                  for i in range(n) for j in range(i + 1, n) if rng.random() < density)
    return Instance(a, edges)


def generate_grid(rows: int, cols: int, seed: int, max_weight: int = 10) -> Instance:
    """Planar grid graph with random weights."""
    rng = random.Random(seed)
    n = rows * cols
    a = tuple(rng.randint(1, max_weight) for _ in range(n))
    edges = []
    for v in range(n):
        r, col = divmod(v, cols)
        if col + 1 < cols:
            edges.append((v, v + 1, rng.randint(1, max_weight)))
        if r + 1 < rows:
            edges.append((v, v + cols, rng.randint(1, max_weight)))
    return Instance(a, tuple(sorted(edges)))


def read(text: str) -> Instance:
    lines = Lines(text)
    n, m = lines.next(2, "header fields (n m)")
    a = tuple(lines.next(n, "node weights"))
    edges = []
    for _ in range(m):
        no = lines.line_no()
        i, j, w = lines.next(3, "edge fields (i j b)")
        if not (0 <= i < n and 0 <= j < n) or i == j:
            raise InstanceFormatError(no, f"bad edge {i} {j}")
        edges.append((min(i, j), max(i, j), w))
    lines.finish()
    inst = Instance(a, tuple(sorted(edges)))
    inst.check()
    return inst


def write(inst: Instance) -> str:
    body = "".join(f"{i} {j} {w}\n" for i, j, w in inst.edges)
    return f"{inst.n} {len(inst.edges)}\n{' '.join(map(str, inst.a))}\n{body}"


def problem_yaml(inst: Instance) -> str:
    entries = {}
    for i, j, w in inst.edges:
        entries[f"{i} {j}"] = w
        entries[f"{j} {i}"] = w
    data = {
        "object_numbers": {"node": inst.n},
        "target": {"C": []},
        "table_values": {
            "N": list(range(inst.n)),
            "a": list(inst.a),
            "b": {"default": 0, "entries": entries},
        },
    }
    return yaml.safe_dump(data, sort_keys=False, default_flow_style=None, width=100)
