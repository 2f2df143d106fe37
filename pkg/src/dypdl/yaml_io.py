"""YAML-DyPDL domain and problem files.

Domain keys: ``objects``, ``state_variables``, ``tables``, ``reduce``,
``cost_type``, ``constraints``, ``base_cases``, ``transitions``,
``dual_bounds``.  Problem keys: ``object_numbers``, ``target``,
``table_values``, plus optional ``tables``, ``constraints``, ``base_cases``,
``transitions`` and ``dual_bounds`` appended to the domain's.

A condition is an expression string or ``{condition: str, forall: [{name,
object}]}``.  Quantifiers over an object type are expanded when the problem
is loaded; quantifiers over a set variable become a single condition checked
against the state.  Transition parameters over a set variable ``V`` expand
over its whole object type and gain the precondition ``(is_in p V)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import yaml

from . import expr as ex
from .expr import BOOL, ELEMENT, NUMERIC, SET, Expr, Scope, TableDecl, Variable
from .model import Model, ModelError
from .parse import ParseError as ExprParseError
from .parse import parse_expression


class ParseError(ValueError):
    """Malformed domain or problem file; ``path`` locates the offending key."""

    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}" if path else reason)
        self.path = path
        self.reason = reason


class GroundingError(ValueError):
    pass


DOMAIN_KEYS = ("objects", "state_variables", "tables", "reduce", "cost_type",
               "constraints", "base_cases", "transitions", "dual_bounds")
PROBLEM_KEYS = ("object_numbers", "target", "table_values", "tables", "constraints",
                "base_cases", "transitions", "dual_bounds")
_VAR_TYPES = ("element", "set", "integer", "continuous")
_TABLE_TYPES = ("element", "set", "integer", "continuous", "bool")


@dataclass(frozen=True)
class Condition:
    """A condition with optional quantifiers ``((name, universe), ...)``."""

    expr: Expr
    forall: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class TransitionTemplate:
    name: str
    parameters: tuple[tuple[str, str], ...]
    preconditions: tuple[Condition, ...]
    effects: tuple[tuple[str, Expr], ...]
    cost: Expr
    forced: bool = False


@dataclass(frozen=True)
class VariableDef:
    name: str
    type: str
    object: str | None = None
    preference: str = "none"


@dataclass(frozen=True)
class TableDef:
    name: str
    type: str
    args: tuple[str, ...] = ()
    object: str | None = None


@dataclass(frozen=True)
class DomainDef:
    objects: tuple[str, ...]
    state_variables: tuple[VariableDef, ...]
    tables: tuple[TableDef, ...]
    reduce: str
    cost_type: str
    constraints: tuple[Condition, ...]
    base_cases: tuple[tuple[Condition, ...], ...]
    transitions: tuple[TransitionTemplate, ...]
    dual_bounds: tuple[Expr, ...]


# ---------------------------------------------------------------------------
# helpers


def _kind(type_name: str) -> str:
    return NUMERIC if type_name in ("integer", "continuous") else type_name


def _mapping(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise ParseError(path, "expected a mapping")
    return value


def _list(value, path: str) -> list:
    if value is None:
        return []
    if not isinstance(value, list):
        raise ParseError(path, "expected a list")
    return value


def _text(value, path: str) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float, str)):
        return str(value)
    raise ParseError(path, "expected an expression string")


def _reject_unknown(data: dict, allowed, path: str) -> None:
    for key in data:
        if key not in allowed:
            raise ParseError(f"{path}{key}" if path else str(key), "unknown key")


def _parse(text, kind: str, scope: Scope, path: str) -> Expr:
    try:
        return parse_expression(_text(text, path), kind, scope)
    except ExprParseError as err:
        raise ParseError(path, f"{err.reason} (column {err.position})") from None


def _scope_from(objects, variables, tables) -> Scope:
    scope = Scope({o: None for o in objects})
    for v in variables:
        scope.add_variable(Variable(v.name, _kind(v.type), v.object, v.preference))
    for t in tables:
        scope.add_table(TableDecl(t.name, _kind(t.type), t.args, t.object))
    return scope


def _parse_condition(item, scope: Scope, path: str) -> Condition:
    if isinstance(item, dict):
        _reject_unknown(item, ("condition", "forall"), path + ".")
        if "condition" not in item:
            raise ParseError(path + ".condition", "missing")
        params = []
        for k, q in enumerate(_list(item.get("forall"), path + ".forall")):
            q = _mapping(q, f"{path}.forall[{k}]")
            _reject_unknown(q, ("name", "object"), f"{path}.forall[{k}].")
            if "name" not in q or "object" not in q:
                raise ParseError(f"{path}.forall[{k}]", "needs name and object")
            universe = str(q["object"])
            try:
                scope.universe_of(universe)
            except ex.ExprTypeError:
                raise ParseError(f"{path}.forall[{k}].object",
                                 f"{universe!r} is not an object type or set variable") from None
            params.append((str(q["name"]), universe))
        inner = scope.with_parameters({n: u for n, u in params})
        return Condition(_parse(item["condition"], BOOL, inner, path + ".condition"), tuple(params))
    return Condition(_parse(item, BOOL, scope, path))


def _parse_variables(items, objects, path):
    out, seen = [], set()
    for k, v in enumerate(_list(items, path)):
        p = f"{path}[{k}]"
        v = _mapping(v, p)
        _reject_unknown(v, ("name", "type", "object", "preference"), p + ".")
        if "name" not in v or "type" not in v:
            raise ParseError(p, "state variables need name and type")
        name, type_ = str(v["name"]), str(v["type"])
        if type_ not in _VAR_TYPES:
            raise ParseError(p + ".type", f"unknown type {type_!r}")
        obj = v.get("object")
        if type_ in ("element", "set"):
            if obj not in objects:
                raise ParseError(p + ".object", f"unknown object type {obj!r}")
        elif obj is not None:
            raise ParseError(p + ".object", "only element and set variables have objects")
        pref = str(v.get("preference", "none"))
        if pref not in ("none", "more", "less"):
            raise ParseError(p + ".preference", f"unknown preference {pref!r}")
        if type_ == "set" and pref != "none":
            raise ParseError(p + ".preference", "set variables cannot be resource variables")
        if name in seen:
            raise ParseError(p + ".name", f"duplicate name {name!r}")
        seen.add(name)
        out.append(VariableDef(name, type_, obj, pref))
    return out


def _parse_tables(items, objects, path, taken=()):
    out, seen = [], set(taken)
    for k, t in enumerate(_list(items, path)):
        p = f"{path}[{k}]"
        t = _mapping(t, p)
        _reject_unknown(t, ("name", "type", "args", "object"), p + ".")
        if "name" not in t or "type" not in t:
            raise ParseError(p, "tables need name and type")
        name, type_ = str(t["name"]), str(t["type"])
        if type_ not in _TABLE_TYPES:
            raise ParseError(p + ".type", f"unknown type {type_!r}")
        args = tuple(str(a) for a in _list(t.get("args"), p + ".args"))
        for a in args:
            if a not in objects:
                raise ParseError(p + ".args", f"unknown object type {a!r}")
        obj = t.get("object")
        if type_ in ("element", "set") and obj not in objects:
            raise ParseError(p + ".object", f"unknown object type {obj!r}")
        if type_ not in ("element", "set") and obj is not None:
            raise ParseError(p + ".object", "only element and set tables have objects")
        if name in seen:
            raise ParseError(p + ".name", f"duplicate name {name!r}")
        seen.add(name)
        out.append(TableDef(name, type_, args, obj))
    return out


def _parse_transitions(items, scope: Scope, path: str):
    out = []
    for k, t in enumerate(_list(items, path)):
        p = f"{path}[{k}]"
        t = _mapping(t, p)
        _reject_unknown(t, ("name", "parameters", "preconditions", "effects", "cost", "forced"), p + ".")
        if "name" not in t:
            raise ParseError(p, "transitions need a name")
        params = []
        for j, q in enumerate(_list(t.get("parameters"), p + ".parameters")):
            q = _mapping(q, f"{p}.parameters[{j}]")
            _reject_unknown(q, ("name", "object"), f"{p}.parameters[{j}].")
            if "name" not in q or "object" not in q:
                raise ParseError(f"{p}.parameters[{j}]", "needs name and object")
            universe = str(q["object"])
            try:
                scope.universe_of(universe)
            except ex.ExprTypeError:
                raise ParseError(f"{p}.parameters[{j}].object",
                                 f"{universe!r} is not an object type or set variable") from None
            params.append((str(q["name"]), universe))
        inner = scope.with_parameters({n: u for n, u in params})
        pre = tuple(_parse_condition(c, inner, f"{p}.preconditions[{j}]")
                    for j, c in enumerate(_list(t.get("preconditions"), p + ".preconditions")))
        effects = []
        for var, e in _mapping(t.get("effects") or {}, p + ".effects").items():
            var = str(var)
            if not scope.has_variable(var):
                raise ParseError(f"{p}.effects.{var}", "unknown state variable")
            effects.append((var, _parse(e, scope.variable(var).kind, inner, f"{p}.effects.{var}")))
        if "cost" not in t:
            raise ParseError(p + ".cost", "missing")
        cost = _parse(t["cost"], NUMERIC, inner, p + ".cost")
        forced = t.get("forced", False)
        if not isinstance(forced, bool):
            raise ParseError(p + ".forced", "expected true or false")
        out.append(TransitionTemplate(str(t["name"]), tuple(params), pre, tuple(effects), cost, forced))
    return out


def _sections(data: dict, scope: Scope, prefix: str = ""):
    constraints = tuple(_parse_condition(c, scope, f"{prefix}constraints[{k}]")
                        for k, c in enumerate(_list(data.get("constraints"), prefix + "constraints")))
    base_cases = []
    for k, case in enumerate(_list(data.get("base_cases"), prefix + "base_cases")):
        p = f"{prefix}base_cases[{k}]"
        base_cases.append(tuple(_parse_condition(c, scope, f"{p}[{j}]")
                                for j, c in enumerate(_list(case, p))))
    transitions = tuple(_parse_transitions(data.get("transitions"), scope, prefix + "transitions"))
    bounds = tuple(_parse(b, NUMERIC, scope, f"{prefix}dual_bounds[{k}]")
                   for k, b in enumerate(_list(data.get("dual_bounds"), prefix + "dual_bounds")))
    return constraints, tuple(base_cases), transitions, bounds


def _load_yaml(text: str) -> dict:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as err:
        raise ParseError("", f"invalid YAML: {err}") from None
    if data is None:
        data = {}
    return _mapping(data, "")


# ---------------------------------------------------------------------------
# domain


def load_domain(text: str) -> DomainDef:
    data = _load_yaml(text)
    _reject_unknown(data, DOMAIN_KEYS, "")
    if "reduce" not in data:
        raise ParseError("reduce", "missing required key")
    reduce = data["reduce"]
    if reduce not in ("min", "max"):
        raise ParseError("reduce", f"expected min or max, got {reduce!r}")
    cost_type = data.get("cost_type", "integer")
    if cost_type not in ("integer", "continuous"):
        raise ParseError("cost_type", f"expected integer or continuous, got {cost_type!r}")
    objects = tuple(str(o) for o in _list(data.get("objects"), "objects"))
    if len(set(objects)) != len(objects):
        raise ParseError("objects", "duplicate object type")
    variables = _parse_variables(data.get("state_variables"), objects, "state_variables")
    tables = _parse_tables(data.get("tables"), objects, "tables", [v.name for v in variables])
    try:
        scope = _scope_from(objects, variables, tables)
    except ex.ExprTypeError as err:
        raise ParseError("", str(err)) from None
    constraints, base_cases, transitions, bounds = _sections(data, scope)
    return DomainDef(objects, tuple(variables), tuple(tables), reduce, cost_type,
                     constraints, base_cases, transitions, bounds)


def _condition_data(c: Condition):
    if not c.forall:
        return str(c.expr)
    return {"condition": str(c.expr), "forall": [{"name": n, "object": u} for n, u in c.forall]}


def _transition_data(t: TransitionTemplate) -> dict:
    out: dict = {"name": t.name}
    if t.parameters:
        out["parameters"] = [{"name": n, "object": u} for n, u in t.parameters]
    if t.preconditions:
        out["preconditions"] = [_condition_data(c) for c in t.preconditions]
    if t.effects:
        out["effects"] = {v: str(e) for v, e in t.effects}
    out["cost"] = str(t.cost)
    if t.forced:
        out["forced"] = True
    return out


def domain_data(domain: DomainDef) -> dict:
    out: dict = {}
    if domain.objects:
        out["objects"] = list(domain.objects)
    variables = []
    for v in domain.state_variables:
        d = {"name": v.name, "type": v.type}
        if v.object is not None:
            d["object"] = v.object
        if v.preference != "none":
            d["preference"] = v.preference
        variables.append(d)
    out["state_variables"] = variables
    tables = []
    for t in domain.tables:
        d = {"name": t.name, "type": t.type}
        if t.args:
            d["args"] = list(t.args)
        if t.object is not None:
            d["object"] = t.object
        tables.append(d)
    if tables:
        out["tables"] = tables
    out["reduce"] = domain.reduce
    out["cost_type"] = domain.cost_type
    if domain.constraints:
        out["constraints"] = [_condition_data(c) for c in domain.constraints]
    if domain.base_cases:
        out["base_cases"] = [[_condition_data(c) for c in case] for case in domain.base_cases]
    out["transitions"] = [_transition_data(t) for t in domain.transitions]
    if domain.dual_bounds:
        out["dual_bounds"] = [str(b) for b in domain.dual_bounds]
    return out


def dump_domain(domain: DomainDef) -> str:
    return yaml.safe_dump(domain_data(domain), sort_keys=False, default_flow_style=None, width=100)


# ---------------------------------------------------------------------------
# problem


def _scalar(value, kind: str, path: str):
    if kind == SET:
        if not isinstance(value, list) or not all(isinstance(x, int) and not isinstance(x, bool)
                                                  for x in value):
            raise ParseError(path, "set values are lists of object indices")
        return value
    if kind == BOOL:
        if not isinstance(value, bool):
            raise ParseError(path, "expected true or false")
        return value
    if kind == ELEMENT:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ParseError(path, "expected an object index")
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise ParseError(path, "expected a number")
    if isinstance(value, str):
        try:
            frac = Fraction(value.strip())
        except ValueError:
            raise ParseError(path, f"expected a number, got {value!r}") from None
        return int(frac) if frac.denominator == 1 else frac
    return value


def _dense_values(value, dims, kind, path):
    if not dims:
        return _scalar(value, kind, path)
    if not isinstance(value, list) or len(value) != dims[0]:
        raise ParseError(path, f"expected a list of {dims[0]} entries")
    return [_dense_values(v, dims[1:], kind, f"{path}[{i}]") for i, v in enumerate(value)]


def _table_values(decl: TableDef, value, dims, path: str):
    """Return (values, default) accepted by :meth:`Model.add_table`."""
    kind = _kind(decl.type)
    if isinstance(value, dict):
        _reject_unknown(value, ("default", "entries"), path + ".")
        default = value.get("default")
        if default is not None:
            default = _scalar(default, kind, path + ".default")
        entries = {}
        for key, v in _mapping(value.get("entries") or {}, path + ".entries").items():
            try:
                idx = tuple(int(x) for x in str(key).replace(",", " ").split())
            except ValueError:
                raise ParseError(f"{path}.entries.{key}", "keys are space-separated indices") from None
            if len(idx) != len(dims):
                raise ParseError(f"{path}.entries.{key}",
                                 f"table {decl.name!r} has arity {len(dims)}, got {len(idx)} indices")
            if any(not 0 <= i < n for i, n in zip(idx, dims)):
                raise ParseError(f"{path}.entries.{key}", "index out of range")
            entries[idx] = _scalar(v, kind, f"{path}.entries.{key}")
        if default is None:
            missing = next((i for i in itertools.product(*map(range, dims)) if i not in entries), None)
            if missing is not None:
                raise GroundingError(f"table {decl.name!r}: no value for {missing} and no default")
        return entries, default
    if not dims and isinstance(value, list) and kind != SET:
        raise ParseError(path, f"table {decl.name!r} is a scalar")
    return _dense_values(value, dims, kind, path), None


def _ground_condition(c: Condition, model: Model) -> Expr:
    body = c.expr
    for name, universe in reversed(c.forall):
        if universe in model.scope.objects:
            n = model.scope.objects[universe]
            body = ex.And(tuple(ex.substitute(body, {name: v}) for v in range(n)))
        else:
            body = ex.Forall(name, ex.SetVar(universe), body)
    return body


def _ground_transitions(templates, model: Model):
    for t in templates:
        universes = []
        for name, universe in t.parameters:
            if universe in model.scope.objects:
                universes.append((name, None, model.scope.objects[universe]))
            elif model.scope.has_variable(universe):
                var = model.scope.variable(universe)
                universes.append((name, universe, model.scope.objects[var.object]))
            else:
                raise GroundingError(f"transition {t.name!r}: unknown parameter universe {universe!r}")
        for values in itertools.product(*(range(n) for _, _, n in universes)):
            binding = {name: v for (name, _, _), v in zip(universes, values)}
            pre = [ex.IsIn(ex.ElementConst(v), ex.SetVar(setvar))
                   for (_, setvar, _), v in zip(universes, values) if setvar is not None]
            pre += [ex.substitute(_ground_condition(c, model), binding) for c in t.preconditions]
            effects = {var: ex.substitute(e, binding) for var, e in t.effects}
            label = t.name if not values else t.name + " " + " ".join(map(str, values))
            model.add_transition(label, effects, ex.substitute(t.cost, binding), pre, t.forced,
                                 tuple(binding.items()))


def load_problem(domain: DomainDef, text: str) -> Model:
    """Ground ``domain`` with the problem in ``text`` into a validated model."""
    data = _load_yaml(text)
    _reject_unknown(data, PROBLEM_KEYS, "")
    numbers = _mapping(data.get("object_numbers") or {}, "object_numbers")
    model = Model(domain.reduce, domain.cost_type)
    for o in domain.objects:
        if o not in numbers:
            raise ParseError(f"object_numbers.{o}", "missing object count")
        n = numbers[o]
        if isinstance(n, bool) or not isinstance(n, int) or n < 0:
            raise ParseError(f"object_numbers.{o}", "expected a nonnegative integer")
        model.add_object_type(o, n)
    _reject_unknown(numbers, domain.objects, "object_numbers.")

    target = _mapping(data.get("target") or {}, "target")
    _reject_unknown(target, [v.name for v in domain.state_variables], "target.")
    for v in domain.state_variables:
        if v.name not in target:
            raise ParseError(f"target.{v.name}", "missing target value")
        value = _scalar(target[v.name], _kind(v.type), f"target.{v.name}")
        try:
            model.add_variable(v.name, _kind(v.type), value, v.object, v.preference)
        except ModelError as err:
            raise ParseError(f"target.{v.name}", str(err)) from None

    extra = _parse_tables(data.get("tables"), domain.objects, "tables")
    tables = list(domain.tables)
    by_name = {t.name: t for t in tables}
    for t in extra:
        old = by_name.get(t.name)
        if old is not None:
            if old != t:
                raise ParseError(f"tables.{t.name}",
                                 f"redefines table with args {list(old.args)} as {list(t.args)}")
            continue
        if model.scope.has_variable(t.name):
            raise ParseError(f"tables.{t.name}", "name clashes with a state variable")
        tables.append(t)
        by_name[t.name] = t

    values = _mapping(data.get("table_values") or {}, "table_values")
    _reject_unknown(values, list(by_name), "table_values.")
    for t in tables:
        if t.name not in values:
            raise GroundingError(f"table {t.name!r} has no values")
        dims = [model.scope.objects[a] for a in t.args]
        vals, default = _table_values(t, values[t.name], dims, f"table_values.{t.name}")
        try:
            model.add_table(t.name, _kind(t.type), vals, t.args, t.object, default)
        except ModelError as err:
            raise ParseError(f"table_values.{t.name}", str(err)) from None

    constraints, base_cases, transitions, bounds = (
        domain.constraints, domain.base_cases, domain.transitions, domain.dual_bounds)
    p_constraints, p_base, p_transitions, p_bounds = _sections(data, model.scope)
    for c in constraints + p_constraints:
        model.add_constraint(_ground_condition(c, model))
    for case in base_cases + p_base:
        model.add_base_case([_ground_condition(c, model) for c in case])
    _ground_transitions(transitions + p_transitions, model)
    for b in bounds + p_bounds:
        model.add_dual_bound(b)

    problems = [d for d in model.validate() if d.severity == "error"]
    if problems:
        raise GroundingError("; ".join(str(d) for d in problems))
    return model


def load(domain_text: str, problem_text: str) -> Model:
    return load_problem(load_domain(domain_text), problem_text)


def load_files(domain_path, problem_path) -> Model:
    with open(domain_path, encoding="utf-8") as f:
        domain = load_domain(f.read())
    with open(problem_path, encoding="utf-8") as f:
        return load_problem(domain, f.read())


# ---------------------------------------------------------------------------
# emitting a grounded model


def _value_data(value, kind):
    if kind == SET:
        return list(ex.members(value))
    if isinstance(value, Fraction):
        return str(value)
    return value


def _dense_data(data, depth, kind):
    if depth == 0:
        return _value_data(data, kind)
    return [_dense_data(d, depth - 1, kind) for d in data]


def _type_name(kind: str, model: Model) -> str:
    return model.cost_type if kind == NUMERIC else kind


def dump_model(model: Model) -> tuple[str, str]:
    """Emit ``model`` as a (domain, problem) pair of YAML-DyPDL texts.

    Transitions are written grounded, in definition order, under their names.
    """
    scope = model.scope
    domain: dict = {"objects": list(scope.objects)}
    variables = []
    for v in model.variables:
        d = {"name": v.name, "type": _type_name(v.kind, model)}
        if v.object is not None:
            d["object"] = v.object
        if v.preference != "none":
            d["preference"] = v.preference
        variables.append(d)
    domain["state_variables"] = variables
    tables = []
    for decl in scope.tables.values():
        d = {"name": decl.name, "type": _type_name(decl.kind, model)}
        if decl.args:
            d["args"] = list(decl.args)
        if decl.object is not None:
            d["object"] = decl.object
        tables.append(d)
    if tables:
        domain["tables"] = tables
    domain["reduce"] = model.reduce
    domain["cost_type"] = model.cost_type
    if model.constraints:
        domain["constraints"] = [str(c) for c in model.constraints]
    if model.base_cases:
        domain["base_cases"] = [[str(c) for c in case] for case in model.base_cases]
    transitions = []
    for t in sorted(model.transitions, key=lambda t: t.order):
        d: dict = {"name": t.name}
        if t.preconditions:
            d["preconditions"] = [str(p) for p in t.preconditions]
        if t.effects:
            d["effects"] = {v: str(e) for v, e in t.effects}
        d["cost"] = str(t.cost)
        if t.forced:
            d["forced"] = True
        transitions.append(d)
    domain["transitions"] = transitions
    if model.dual_bounds:
        domain["dual_bounds"] = [str(b) for b in model.dual_bounds]

    target = {}
    for v, x in zip(model.variables, model.target):
        target[v.name] = _value_data(x, v.kind)
    problem = {
        "object_numbers": dict(scope.objects),
        "target": target,
        "table_values": {
            name: _dense_data(scope.table_data[name].data, decl.arity, decl.kind)
            for name, decl in scope.tables.items()
        },
    }
    dump = lambda d: yaml.safe_dump(d, sort_keys=False, default_flow_style=None, width=100)  # noqa: E731
    return dump(domain), dump(problem)
