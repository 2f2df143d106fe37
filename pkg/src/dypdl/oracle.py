"""Exhaustive ground truth for DyPDL models.

:class:`Oracle` evaluates the recursive equations directly with a memo table,
for any reduce direction and any cost expression.  States already on the
recursion stack count as infeasible, which is exact for cost expressions
that are nonnegative and isotone in the successor value.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Sequence

from .model import Model, Transition


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class OracleResult:
    value: object
    transitions: tuple[str, ...] | None
    states_visited: int

    @property
    def feasible(self) -> bool:
        return not (isinstance(self.value, float) and math.isinf(self.value))


class Oracle:
    """Memoized recursion ``V(S) = reduce over T(S) of cost_t(V(S[t]), S)``."""

    def __init__(self, model: Model, max_states: int = 10**6, memo: bool = True):
        self.model = model
        self.max_states = max_states
        self.use_memo = memo
        self.minimize = model.reduce == "min"
        self.worst = math.inf if self.minimize else -math.inf
        self.memo: dict = {}
        self._stack: set = set()
        self.calls = 0

    def value(self, state) -> object:
        limit = sys.getrecursionlimit()
        if limit < 10000:
            sys.setrecursionlimit(10000)
        try:
            return self._value(state)[0]
        finally:
            sys.setrecursionlimit(limit)

    def _value(self, state):
        cm = self.model.compiled
        if not cm.check_constraints(state):
            return self.worst, None
        if cm.is_base(state):
            return 0, None
        if self.use_memo:
            hit = self.memo.get(state)
            if hit is not None:
                return hit
        if state in self._stack:
            return self.worst, None
        self.calls += 1
        if self.calls > self.max_states:
            raise BudgetExceeded(f"more than {self.max_states} states")
        self._stack.add(state)
        best, best_t = self.worst, None
        try:
            for ct in cm.applicable(state):
                v, _ = self._value(ct.apply(state))
                if isinstance(v, float) and math.isinf(v):
                    continue
                c = ct.cost(state, v)
                if (c < best) if self.minimize else (c > best):
                    best, best_t = c, ct
        finally:
            self._stack.discard(state)
        out = (best, best_t)
        if self.use_memo:
            self.memo[state] = out
            if len(self.memo) > self.max_states:
                raise BudgetExceeded(f"memo table exceeds {self.max_states} states")
        return out

    def solve(self) -> OracleResult:
        root = self.model.target
        value = self.value(root)
        path = None
        if not (isinstance(value, float) and math.isinf(value)):
            path = []
            state = root
            cm = self.model.compiled
            while not cm.is_base(state):
                _, ct = self._value(state)
                path.append(ct.name)
                state = ct.apply(state)
            path = tuple(path)
        return OracleResult(value, path, len(self.memo) if self.use_memo else self.calls)


def oracle_solve(model: Model, max_states: int = 10**6) -> OracleResult:
    return Oracle(model, max_states).solve()


def enumerate_paths(model: Model, max_paths: int = 10**4):
    """Best value over all simple paths from the target state to base states.

    Costs are folded backward along each complete path; no memoization.
    Raises :class:`BudgetExceeded` past ``max_paths`` complete paths.
    """
    cm = model.compiled
    minimize = model.reduce == "min"
    worst = math.inf if minimize else -math.inf
    best = worst
    count = 0
    root = model.target
    if not cm.check_constraints(root):
        return worst

    stack = [(root, [], frozenset([root]))]
    while stack:
        state, steps, on_path = stack.pop()
        if cm.is_base(state):
            count += 1
            if count > max_paths:
                raise BudgetExceeded(f"more than {max_paths} paths")
            value = 0
            for ct, s in reversed(steps):
                value = ct.cost(s, value)
            if (value < best) if minimize else (value > best):
                best = value
            continue
        for ct in cm.applicable(state):
            succ = ct.apply(state)
            if succ in on_path or not cm.check_constraints(succ):
                continue
            stack.append((succ, steps + [(ct, state)], on_path | {succ}))
    return best


@dataclass
class Valid:
    cost: object


@dataclass
class Violation:
    step: int
    reason: str


def validate_solution(model: Model, transitions: Sequence) -> Valid | Violation:
    """Replay ``transitions`` (names or :class:`Transition` objects) from the target state."""
    cm = model.compiled
    state = model.target
    trace = []
    for step, t in enumerate(transitions):
        if not cm.check_constraints(state):
            return Violation(step, "state constraint violated")
        if cm.is_base(state):
            return Violation(step, "transition from a base state")
        name = t.name if isinstance(t, Transition) else str(t)
        try:
            tr = model.transition(name)
        except KeyError:
            return Violation(step, f"unknown transition {name!r}")
        ct = cm.by_order[tr.order]
        if not ct.applicable(state):
            return Violation(step, "precondition")
        forced = next((f for f in cm.forced if f.applicable(state)), None)
        if forced is not None and forced is not ct:
            return Violation(step, f"forced transition {forced.name!r} must be taken")
        trace.append((ct, state))
        state = ct.apply(state)
    step = len(trace)
    if not cm.check_constraints(state):
        return Violation(step, "state constraint violated")
    if not cm.is_base(state):
        return Violation(step, "not a base state")
    value = 0
    for ct, s in reversed(trace):
        value = ct.cost(s, value)
    return Valid(value)
