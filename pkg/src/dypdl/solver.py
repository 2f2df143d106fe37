"""Cost-algebraic A* over DyPDL models.

Transition costs must have the shape ``(+ e cost)`` or ``(max e cost)`` (in
either argument order), or be the bare placeholder ``cost``; ``e`` is the
edge weight and must not mention the placeholder.  Best-first order is by
``f = g (x) h``, ties broken by smaller ``h`` and then by most recent
insertion.
"""

from __future__ import annotations

import heapq
import logging
import math
import operator
import time
from dataclasses import dataclass, field
from typing import Callable

from . import expr as ex
from .model import Dominance, Model

log = logging.getLogger(__name__)

OPTIMAL = "Optimal"
INFEASIBLE = "Infeasible"
TIME_LIMIT = "TimeLimit"
MEMORY_LIMIT = "MemoryLimit"
UNSUPPORTED = "UnsupportedCostForm"

DEFAULT_MAX_GENERATED = 10**7


@dataclass(frozen=True)
class CostAlgebra:
    """A monoid ``(numbers >= 0, combine, identity)`` ordered by ``<=``."""

    name: str
    combine: Callable
    identity: int = 0

    def __repr__(self) -> str:
        return f"CostAlgebra({self.name})"


PLUS = CostAlgebra("plus", operator.add)
MAX = CostAlgebra("max", max)


def algebra_violations(algebra: CostAlgebra, a, b, c) -> list[int]:
    """Cost-algebra conditions 1-10 that fail on the triple ``(a, b, c)``.

    The carrier is the nonnegative numbers plus infinity, ordered by ``<=``,
    with ``min`` as the selection operator and infinity as the zero element.
    """
    x, one, zero = algebra.combine, algebra.identity, math.inf
    le = operator.le
    failed = []
    checks = {
        1: all(v >= 0 for v in (x(a, b), x(b, c), x(a, c))),
        2: x(a, x(b, c)) == x(x(a, b), c),
        3: x(a, one) == a and x(one, a) == a,
        4: le(a, a),
        5: not (le(a, b) and le(b, a)) or a == b,
        6: not (le(a, b) and le(b, c)) or le(a, c),
        7: le(a, b) or le(b, a),
        8: all(le(min(a, b, c), v) for v in (a, b, c)),
        9: le(a, zero) and le(one, a),
        10: not le(a, b) or (le(x(a, c), x(b, c)) and le(x(c, a), x(c, b))),
    }
    for number, ok in checks.items():
        if not ok:
            failed.append(number)
    return failed


class UnsupportedCostForm(Exception):
    pass


class NegativeEdgeWeight(ArithmeticError):
    def __init__(self, transition: str, state):
        super().__init__(f"transition {transition!r} has a negative weight in state {state}")
        self.transition = transition
        self.state = state


def edge_weight(cost: ex.Expr) -> tuple[str, ex.Expr | None]:
    """Split a cost expression into (form, edge weight expression).

    The form is ``"plus"``, ``"max"`` or ``"any"`` for the bare placeholder
    (weight ``None``).  Raises :class:`UnsupportedCostForm` otherwise.
    """
    if isinstance(cost, ex.CostRef):
        return "any", None
    if isinstance(cost, ex.NumOp) and cost.op in ("+", "max"):
        form = "plus" if cost.op == "+" else "max"
        left, right = cost.left, cost.right
        if isinstance(right, ex.CostRef) and not ex.contains_cost(left):
            return form, left
        if isinstance(left, ex.CostRef) and not ex.contains_cost(right):
            return form, right
    raise UnsupportedCostForm(f"cost expression {cost} is not (op e cost)")


def classify_cost_form(model: Model) -> CostAlgebra:
    """Return the cost algebra shared by every transition of ``model``.

    Raises :class:`UnsupportedCostForm` for maximization, mixed forms or costs
    that are not a weight combined with the placeholder.
    """
    if model.reduce != "min":
        raise UnsupportedCostForm("only minimization is supported by A*")
    forms = {edge_weight(t.cost)[0] for t in model.transitions} - {"any"}
    if len(forms) > 1:
        raise UnsupportedCostForm(f"mixed cost forms {sorted(forms)}")
    return MAX if forms == {"max"} else PLUS


@dataclass
class Stats:
    expanded: int = 0
    generated: int = 0
    pruned_by_dominance: int = 0
    peak_registry_size: int = 0
    wall_time: float = 0.0
    blind_heuristic: bool = False


@dataclass
class Solution:
    status: str
    cost: object = None
    transitions: tuple[str, ...] | None = None
    best_bound: object = None
    stats: Stats = field(default_factory=Stats)
    algebra: str | None = None

    @property
    def is_optimal(self) -> bool:
        return self.status == OPTIMAL


class _Entry:
    __slots__ = ("resources", "g", "node")

    def __init__(self, resources, g, node):
        self.resources = resources
        self.g = g
        self.node = node


def solve(model: Model, time_limit: float | None = None,
          max_generated: int = DEFAULT_MAX_GENERATED, dominance: bool = True,
          on_dominance: Callable | None = None) -> Solution:
    """Solve ``model`` to optimality or until a limit is reached.

    ``max_generated`` bounds the number of generated states (checked before
    each expansion).  ``on_dominance(dominating, dominated)`` is called for
    every generated state pruned by a different dominating state.  With
    ``dominance=False`` resource variables only take part in exact duplicate
    detection.
    """
    start = time.perf_counter()
    stats = Stats()
    try:
        algebra = classify_cost_form(model)
    except UnsupportedCostForm as err:
        log.info("unsupported cost form: %s", err)
        return Solution(UNSUPPORTED, stats=stats)

    cm = model.compiled
    combine = algebra.combine
    is_plus = algebra is PLUS
    eps = 1e-9 if model.cost_type == "continuous" else 0
    weights = {}
    for ct in cm.transitions:
        _, w = edge_weight(ct.transition.cost)
        weights[ct.order] = ex.compile_expr(w, model.scope) if w is not None else None
    stats.blind_heuristic = not model.dual_bounds

    use_resources = dominance and cm.has_resources
    if use_resources:
        split = cm.split
        compare = cm.compare_resources
    bound = cm.dual_bound
    applicable = cm.applicable
    check = cm.check_constraints
    is_base = cm.is_base

    def finish(status, cost=None, path=None, best=None):
        stats.wall_time = time.perf_counter() - start
        return Solution(status, cost, path, best, stats, algebra.name)

    root = model.target
    if not check(root):
        return finish(INFEASIBLE)

    # node arrays: state, g, f, parent, transition name
    states = [root]
    gs = [algebra.identity]
    fs = []
    parents = [-1]
    via: list[str | None] = [None]
    stale = [False]
    h0 = bound(root)
    fs.append(combine(algebra.identity, h0))
    open_list = [(fs[0], h0, 0, 0)]
    seq = 0
    registry: dict = {}
    if use_resources:
        key, res = split(root)
        registry[key] = [_Entry(res, algebra.identity, 0)]
    else:
        registry[root] = _Entry((), algebra.identity, 0)
    registry_size = 1
    best_bound = None

    def open_bound():
        live = [f for f, _, _, n in open_list if not stale[n]]
        candidates = [b for b in (best_bound, min(live) if live else None) if b is not None]
        return max(candidates) if candidates else None

    while open_list:
        f, h, _, node = open_list[0]
        if stale[node]:
            heapq.heappop(open_list)
            continue
        if stats.generated >= max_generated:
            return finish(MEMORY_LIMIT, best=open_bound())
        if time_limit is not None and time.perf_counter() - start >= time_limit:
            return finish(TIME_LIMIT, best=open_bound())
        heapq.heappop(open_list)
        stale[node] = True  # closed nodes never pop twice
        if best_bound is None or f > best_bound:
            best_bound = f
        state = states[node]
        g = gs[node]
        if is_base(state):
            path = []
            n = node
            while parents[n] >= 0:
                path.append(via[n])
                n = parents[n]
            path.reverse()
            return finish(OPTIMAL, g, tuple(path), g)
        stats.expanded += 1
        for ct in applicable(state):
            succ = ct.apply(state)
            if not check(succ):
                continue
            wf = weights[ct.order]
            if wf is None:
                g2 = g
            else:
                w = wf(state, None)
                if w < 0:
                    raise NegativeEdgeWeight(ct.name, model.describe(state))
                g2 = g + w if is_plus else (g if g >= w else w)

            if use_resources:
                key, res = split(succ)
                bucket = registry.get(key)
                if bucket is None:
                    bucket = registry[key] = []
                pruned = False
                keep = []
                for entry in bucket:
                    rel = compare(entry.resources, res)
                    if rel is Dominance.EQUAL or rel is Dominance.LEFT:
                        if entry.g <= g2 + eps:
                            pruned = True
                            if on_dominance is not None and rel is Dominance.LEFT:
                                on_dominance(states[entry.node], succ)
                            break
                    if (rel is Dominance.EQUAL or rel is Dominance.RIGHT) and g2 <= entry.g + eps:
                        stale[entry.node] = True
                        if on_dominance is not None and rel is Dominance.RIGHT:
                            on_dominance(succ, states[entry.node])
                        continue
                    keep.append(entry)
                if pruned:
                    stats.pruned_by_dominance += 1
                    continue
                registry_size += len(keep) + 1 - len(bucket)
                keep.append(_Entry(res, g2, len(states)))
                registry[key] = keep
            else:
                entry = registry.get(succ)
                if entry is not None:
                    if entry.g <= g2 + eps:
                        continue
                    stale[entry.node] = True
                    entry.g = g2
                    entry.node = len(states)
                else:
                    registry[succ] = _Entry((), g2, len(states))
                    registry_size += 1

            h2 = bound(succ)
            f2 = g2 + h2 if is_plus else (g2 if g2 >= h2 else h2)
            new = len(states)
            states.append(succ)
            gs.append(g2)
            fs.append(f2)
            parents.append(node)
            via.append(ct.name)
            stale.append(False)
            seq += 1
            heapq.heappush(open_list, (f2, h2, -seq, new))
            stats.generated += 1
        if registry_size > stats.peak_registry_size:
            stats.peak_registry_size = registry_size

    return finish(INFEASIBLE)


def replay_g(model: Model, transitions) -> object:
    """Path cost from the target state along ``transitions`` under the model's algebra."""
    algebra = classify_cost_form(model)
    state = model.target
    g = algebra.identity
    for name in transitions:
        t = model.transition(name)
        _, w = edge_weight(t.cost)
        if w is not None:
            g = algebra.combine(g, ex.compile_expr(w, model.scope)(state, None))
        state = model.apply(t, state)
    return g


def is_infinite(value) -> bool:
    return isinstance(value, float) and math.isinf(value)
