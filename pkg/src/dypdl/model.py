"""DyPDL models: state variables, constants, transitions and their semantics.

A state is a plain tuple with one value per state variable, in declaration
order.  Set values are int bitmasks, element values are ints and numeric
values are ints, fractions or floats.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from . import expr as ex
from .expr import BOOL, ELEMENT, NUMERIC, SET, Expr, Scope, TableDecl, Variable
from .parse import parse_expression

State = tuple


class Dominance(enum.Enum):
    LEFT = "leftDominates"
    RIGHT = "rightDominates"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class Transition:
    name: str
    effects: tuple[tuple[str, Expr], ...]
    cost: Expr
    preconditions: tuple[Expr, ...] = ()
    forced: bool = False
    parameters: tuple[tuple[str, int], ...] = ()
    order: int = 0


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" or "warning"
    message: str

    def __str__(self) -> str:
        return f"{self.severity}: {self.message}"


class ModelError(ValueError):
    pass


def _number(value):
    if isinstance(value, bool):
        raise ModelError(f"expected a number, got {value!r}")
    if isinstance(value, (int, float, Fraction)):
        return value
    if isinstance(value, str):
        try:
            frac = Fraction(value.strip())
        except ValueError:
            raise ModelError(f"expected a number, got {value!r}") from None
        return int(frac) if frac.denominator == 1 else frac
    raise ModelError(f"expected a number, got {value!r}")


class Model:
    """A DyPDL model built programmatically.

    Expressions may be given as text (parsed in the model's scope) or as
    expression trees.  Compilation to closures happens lazily and is reset
    whenever the model changes.
    """

    def __init__(self, reduce: str = "min", cost_type: str = "integer", name: str = "model"):
        if reduce not in ("min", "max"):
            raise ModelError(f"reduce must be min or max, got {reduce!r}")
        if cost_type not in ("integer", "continuous"):
            raise ModelError(f"cost_type must be integer or continuous, got {cost_type!r}")
        self.name = name
        self.reduce = reduce
        self.cost_type = cost_type
        self.scope = Scope()
        self._target: dict[str, object] = {}
        self.transitions: list[Transition] = []
        self.base_cases: list[tuple[Expr, ...]] = []
        self.constraints: list[Expr] = []
        self.dual_bounds: list[Expr] = []
        self._compiled: _Compiled | None = None

    # -- declarations --------------------------------------------------------

    def _changed(self):
        self._compiled = None

    def add_object_type(self, name: str, count: int) -> str:
        ex.ObjectType(name, count)
        if name in self.scope.objects:
            raise ModelError(f"object type {name!r} already declared")
        self.scope.objects[name] = count
        self._changed()
        return name

    def add_variable(self, name: str, kind: str, target, object: str | None = None,
                     preference: str = "none") -> str:
        if kind in ("integer", "continuous"):
            kind = NUMERIC
        var = Variable(name, kind, object, preference)
        if object is not None and object not in self.scope.objects:
            raise ModelError(f"unknown object type {object!r}")
        self.scope.add_variable(var)
        self._target[name] = self._value(kind, target, object, f"target of {name}")
        self._changed()
        return name

    def add_table(self, name: str, kind: str, values, args: Iterable[str] = (),
                  object: str | None = None, default=None) -> str:
        """Declare a table and its values.

        ``values`` is a scalar (no args), a nested sequence matching the index
        dimensions, or a mapping from index tuples to values completed by
        ``default``.
        """
        if kind in ("integer", "continuous"):
            kind = NUMERIC
        decl = TableDecl(name, kind, tuple(args), object)
        for o in decl.args + ((object,) if object else ()):
            if o not in self.scope.objects:
                raise ModelError(f"table {name!r}: unknown object type {o!r}")
        dims = tuple(self.scope.objects[o] for o in decl.args)
        conv = lambda x: self._value(kind, x, object, f"table {name}")  # noqa: E731
        if isinstance(values, Mapping):
            entries = {}
            for key, v in values.items():
                key = (key,) if isinstance(key, int) else tuple(key)
                entries[key] = conv(v)
            dflt = None if default is None else conv(default)
            try:
                table = ex.dense_table(decl, dims, entries, dflt)
            except KeyError as err:
                raise ModelError(f"table {name!r}: missing entry {err.args[0]} and no default") from None
            except IndexError as err:
                raise ModelError(str(err)) from None
        else:
            table = ex.Table(decl, self._dense(values, dims, conv, name))
        self.scope.add_table(decl, table)
        self._changed()
        return name

    def _dense(self, values, dims, conv, name):
        if not dims:
            return conv(values)
        if not isinstance(values, (list, tuple)) or len(values) != dims[0]:
            raise ModelError(f"table {name!r}: expected {dims[0]} rows")
        return tuple(self._dense(v, dims[1:], conv, name) for v in values)

    def _value(self, kind: str, value, object: str | None, what: str):
        if kind == SET:
            if isinstance(value, int) and not isinstance(value, bool):
                mask = value
            else:
                mask = ex.to_mask(int(i) for i in value)
            n = self.scope.objects[object]
            if mask >> n:
                raise ModelError(f"{what}: set member outside object type {object!r}")
            return mask
        if kind == ELEMENT:
            if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                raise ModelError(f"{what}: element values are nonnegative ints, got {value!r}")
            return value
        if kind == BOOL:
            if not isinstance(value, bool):
                raise ModelError(f"{what}: expected a boolean, got {value!r}")
            return value
        number = _number(value)
        if self.cost_type == "integer" and isinstance(number, float):
            if number != int(number):
                raise ModelError(f"{what}: integer model got non-integral {number!r}")
            number = int(number)
        return number

    def expression(self, text, kind: str, parameters: Mapping[str, str] | None = None) -> Expr:
        if isinstance(text, Expr):
            if text.kind != kind:
                if text.kind == ELEMENT and kind == NUMERIC:
                    return ex.ToNumeric(text)
                raise ex.ExprTypeError(f"expected {kind} expression, got {text.kind}")
            return text
        scope = self.scope.with_parameters(dict(parameters)) if parameters else self.scope
        return parse_expression(text, kind, scope)

    def add_transition(self, name: str, effects: Mapping[str, object] | None = None,
                       cost="cost", preconditions: Iterable = (), forced: bool = False,
                       parameters: Iterable[tuple[str, int]] = ()) -> Transition:
        eff = []
        for var_name, e in (effects or {}).items():
            if not self.scope.has_variable(var_name):
                raise ModelError(f"transition {name!r}: effect on unknown variable {var_name!r}")
            eff.append((var_name, self.expression(e, self.scope.variable(var_name).kind)))
        t = Transition(
            name=name,
            effects=tuple(eff),
            cost=self.expression(cost, NUMERIC),
            preconditions=tuple(self.expression(p, BOOL) for p in preconditions),
            forced=forced,
            parameters=tuple(parameters),
            order=len(self.transitions),
        )
        self.transitions.append(t)
        self._changed()
        return t

    def add_base_case(self, conditions: Iterable) -> None:
        self.base_cases.append(tuple(self.expression(c, BOOL) for c in conditions))
        self._changed()

    def add_constraint(self, condition) -> None:
        self.constraints.append(self.expression(condition, BOOL))
        self._changed()

    def add_dual_bound(self, bound) -> None:
        self.dual_bounds.append(self.expression(bound, NUMERIC))
        self._changed()

    # -- states --------------------------------------------------------------

    @property
    def variables(self) -> list[Variable]:
        return self.scope.variables

    @property
    def target(self) -> State:
        return tuple(self._target[v.name] for v in self.variables)

    def state(self, **values) -> State:
        """Build a state from keyword values, defaulting to the target state."""
        out = []
        for v in self.variables:
            if v.name in values:
                out.append(self._value(v.kind, values.pop(v.name), v.object, v.name))
            else:
                out.append(self._target[v.name])
        if values:
            raise ModelError(f"unknown variables {sorted(values)}")
        return tuple(out)

    def describe(self, state: State) -> dict:
        out = {}
        for v, x in zip(self.variables, state):
            out[v.name] = sorted(ex.members(x)) if v.kind == SET else x
        return out

    def transition(self, name: str) -> Transition:
        for t in self.transitions:
            if t.name == name:
                return t
        raise KeyError(name)

    # -- semantics -----------------------------------------------------------

    @property
    def compiled(self) -> _Compiled:
        if self._compiled is None:
            self._compiled = _Compiled(self)
        return self._compiled

    def applicable_transitions(self, state: State) -> list[Transition]:
        return [ct.transition for ct in self.compiled.applicable(state)]

    def apply(self, transition: Transition, state: State) -> State:
        return self.compiled.by_order[transition.order].apply(state)

    def is_base(self, state: State) -> bool:
        return self.compiled.is_base(state)

    def check_constraints(self, state: State) -> bool:
        return self.compiled.check_constraints(state)

    def dual_bound(self, state: State):
        return self.compiled.dual_bound(state)

    def cost(self, transition: Transition, state: State, successor_value):
        """Value of the cost expression given the successor's value."""
        return self.compiled.by_order[transition.order].cost(state, successor_value)

    def dominance(self, a: State, b: State) -> Dominance:
        return self.compiled.dominance(a, b)

    def without_preferences(self) -> Model:
        """Copy of this model with every resource preference erased."""
        other = Model(self.reduce, self.cost_type, self.name)
        other.scope = Scope(dict(self.scope.objects),
                            [Variable(v.name, v.kind, v.object) for v in self.variables],
                            dict(self.scope.tables), dict(self.scope.table_data))
        other._target = dict(self._target)
        other.transitions = list(self.transitions)
        other.base_cases = list(self.base_cases)
        other.constraints = list(self.constraints)
        other.dual_bounds = list(self.dual_bounds)
        return other

    # -- validation ----------------------------------------------------------

    def validate(self) -> list[Diagnostic]:
        """Return diagnostics; an empty list means the model is well-formed."""
        diags: list[Diagnostic] = []
        err = lambda msg: diags.append(Diagnostic("error", msg))  # noqa: E731
        warn = lambda msg: diags.append(Diagnostic("warning", msg))  # noqa: E731

        for v in self.variables:
            if v.name not in self._target:
                err(f"target state assigns no value to {v.name!r}")
                continue
            x = self._target[v.name]
            if v.kind == ELEMENT and x >= self.scope.objects[v.object]:
                err(f"target value {x} of {v.name!r} outside object type {v.object!r}")

        def check(e: Expr, where: str, allow_cost: bool):
            variables, tables, params = ex.referenced_names(e)
            for name in sorted(variables):
                if not self.scope.has_variable(name):
                    err(f"{where}: undeclared variable {name!r}")
            for name in sorted(tables):
                if name not in self.scope.tables:
                    err(f"{where}: undeclared table {name!r}")
                elif name not in self.scope.table_data:
                    err(f"{where}: table {name!r} has no values")
            for name in sorted(params):
                err(f"{where}: unbound parameter {name!r}")
            if not allow_cost and ex.contains_cost(e):
                err(f"{where}: cost placeholder outside a cost expression")

        orders = set()
        for t in self.transitions:
            if t.order in orders:
                err(f"transition {t.name!r}: duplicate definition order {t.order}")
            orders.add(t.order)
            for var_name, e in t.effects:
                if not self.scope.has_variable(var_name):
                    err(f"transition {t.name!r}: effect on undeclared variable {var_name!r}")
                elif self.scope.variable(var_name).kind != e.kind:
                    err(f"transition {t.name!r}: effect on {var_name!r} has kind {e.kind}")
                check(e, f"effect {t.name}.{var_name}", False)
            for p in t.preconditions:
                check(p, f"precondition of {t.name}", False)
            check(t.cost, f"cost of {t.name}", True)
            if not ex.contains_cost(t.cost):
                warn(f"transition {t.name!r}: constant cost expression")
        for i, case in enumerate(self.base_cases):
            for c in case:
                check(c, f"base case {i}", False)
        for i, c in enumerate(self.constraints):
            check(c, f"state constraint {i}", False)
        for i, b in enumerate(self.dual_bounds):
            check(b, f"dual bound {i}", False)

        if not any(d.severity == "error" for d in diags):
            try:
                _Compiled(self)
            except (ex.ExprTypeError, KeyError) as e:
                err(f"compilation failed: {e}")
        return diags


class _CompiledTransition:
    __slots__ = ("transition", "pre", "effects", "cost_fn", "forced", "name", "order")

    def __init__(self, t: Transition, scope: Scope):
        c = lambda e: ex.compile_expr(e, scope)  # noqa: E731
        self.transition = t
        self.name = t.name
        self.order = t.order
        self.forced = t.forced
        self.pre = [c(p) for p in t.preconditions]
        self.effects = [(scope.index_of(name), c(e)) for name, e in t.effects]
        self.cost_fn = c(t.cost)

    def applicable(self, state) -> bool:
        for p in self.pre:
            if not p(state, None):
                return False
        return True

    def apply(self, state):
        new = list(state)
        for idx, f in self.effects:
            new[idx] = f(state, None)
        return tuple(new)

    def cost(self, state, value):
        return self.cost_fn(state, value)


class _Compiled:
    """Closures for every expression of a model."""

    def __init__(self, model: Model):
        scope = model.scope
        c = lambda e: ex.compile_expr(e, scope)  # noqa: E731
        self.model = model
        self.transitions = [_CompiledTransition(t, scope) for t in model.transitions]
        self.by_order = {ct.order: ct for ct in self.transitions}
        ordered = sorted(self.transitions, key=lambda ct: ct.order)
        self.forced = [ct for ct in ordered if ct.forced]
        self.normal = [ct for ct in ordered if not ct.forced]
        self.base = [[c(b) for b in case] for case in model.base_cases]
        self.constraints = [c(x) for x in model.constraints]
        self.bounds = [c(b) for b in model.dual_bounds]
        self.minimize = model.reduce == "min"

        variables = model.variables
        self.key_idx = [i for i, v in enumerate(variables) if not v.is_resource]
        self.res_idx = [i for i, v in enumerate(variables) if v.is_resource]
        self.res_more = [variables[i].preference == "more" for i in self.res_idx]
        self.has_resources = bool(self.res_idx)

    def applicable(self, state) -> list[_CompiledTransition]:
        for ct in self.forced:
            if ct.applicable(state):
                return [ct]
        return [ct for ct in self.normal if ct.applicable(state)]

    def is_base(self, state) -> bool:
        for case in self.base:
            for f in case:
                if not f(state, None):
                    break
            else:
                return True
        return False

    def check_constraints(self, state) -> bool:
        for f in self.constraints:
            if not f(state, None):
                return False
        return True

    def dual_bound(self, state):
        if self.minimize:
            best = 0
            for f in self.bounds:
                value = f(state, None)
                if value > best:
                    best = value
            return best
        if not self.bounds:
            return math.inf
        return min(f(state, None) for f in self.bounds)

    def split(self, state) -> tuple[tuple, tuple]:
        """(non-resource signature, resource values)."""
        if not self.has_resources:
            return state, ()
        return tuple(state[i] for i in self.key_idx), tuple(state[i] for i in self.res_idx)

    def compare_resources(self, ra: tuple, rb: tuple) -> Dominance:
        a_better = b_better = False
        for x, y, more in zip(ra, rb, self.res_more):
            if x == y:
                continue
            if (x > y) == more:
                a_better = True
            else:
                b_better = True
            if a_better and b_better:
                return Dominance.INCOMPARABLE
        if a_better:
            return Dominance.LEFT
        if b_better:
            return Dominance.RIGHT
        return Dominance.EQUAL

    def dominance(self, a, b) -> Dominance:
        ka, ra = self.split(a)
        kb, rb = self.split(b)
        if ka != kb:
            return Dominance.INCOMPARABLE
        return self.compare_resources(ra, rb)


def validate_model(model: Model) -> list[Diagnostic]:
    return model.validate()


def errors(diagnostics: list[Diagnostic]) -> list[Diagnostic]:
    return [d for d in diagnostics if d.severity == "error"]

