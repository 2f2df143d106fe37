"""Typed expression trees over state variables and constant tables.

Four expression kinds exist: ``element`` (object indices), ``set`` (subsets of
an object universe, stored as int bitmasks), ``numeric`` and ``bool``
(conditions).  Every node is an immutable dataclass.  Evaluation goes through
:func:`compile_expr`, which turns a tree into a Python closure ``f(state, v)``
where ``state`` is a tuple of variable values and ``v`` is the value bound to
the cost placeholder (``None`` outside cost expressions).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Union

ELEMENT = "element"
SET = "set"
NUMERIC = "numeric"
BOOL = "bool"
KINDS = (ELEMENT, SET, NUMERIC, BOOL)

Number = Union[int, float, Fraction]


class EvalError(ArithmeticError):
    """Raised when an expression cannot be evaluated in a state."""


class ExprTypeError(TypeError):
    """Raised when an expression tree is not type-correct."""


def members(mask: int) -> Iterator[int]:
    """Yield the indices of the set bits of ``mask`` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_mask(indices) -> int:
    mask = 0
    for i in indices:
        if i < 0:
            raise ValueError(f"negative object index {i}")
        mask |= 1 << i
    return mask


# ---------------------------------------------------------------------------
# declarations


@dataclass(frozen=True)
class ObjectType:
    name: str
    count: int

    def __post_init__(self):
        if self.count < 0:
            raise ValueError(f"object type {self.name!r} has negative count")


@dataclass(frozen=True)
class Variable:
    """A state variable declaration.

    ``preference`` is ``"none"``, ``"more"`` or ``"less"``; a variable with a
    preference is a resource variable.
    """

    name: str
    kind: str
    object: str | None = None
    preference: str = "none"

    def __post_init__(self):
        if self.kind not in (ELEMENT, SET, NUMERIC):
            raise ExprTypeError(f"variable {self.name!r}: bad kind {self.kind!r}")
        if self.kind in (ELEMENT, SET) and self.object is None:
            raise ExprTypeError(f"variable {self.name!r} needs an object type")
        if self.preference not in ("none", "more", "less"):
            raise ExprTypeError(f"variable {self.name!r}: bad preference {self.preference!r}")
        if self.kind == SET and self.preference != "none":
            raise ExprTypeError(f"set variable {self.name!r} cannot have a preference")

    @property
    def is_resource(self) -> bool:
        return self.preference != "none"


@dataclass(frozen=True)
class TableDecl:
    """Declaration of a table of constants.

    ``args`` lists the object type of each index position (empty for a scalar
    constant).  ``object`` is the object type of element/set values.
    """

    name: str
    kind: str
    args: tuple[str, ...] = ()
    object: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ExprTypeError(f"table {self.name!r}: bad kind {self.kind!r}")
        if self.kind in (ELEMENT, SET) and self.object is None:
            raise ExprTypeError(f"table {self.name!r} needs a value object type")
        object.__setattr__(self, "args", tuple(self.args))

    @property
    def arity(self) -> int:
        return len(self.args)


@dataclass(frozen=True)
class Table:
    """A table with its values stored densely as nested tuples."""

    decl: TableDecl
    data: object

    @property
    def name(self) -> str:
        return self.decl.name

    def get(self, *index):
        value = self.data
        for i in index:
            value = value[i]
        return value


def dense_table(decl: TableDecl, dims: tuple[int, ...], entries: dict, default=None) -> Table:
    """Build a dense table from a sparse ``{index tuple: value}`` mapping.

    Raises ``KeyError`` naming the first missing index when no default is given.
    """

    def build(prefix: tuple[int, ...]):
        depth = len(prefix)
        if depth == len(dims):
            key = prefix
            if key in entries:
                return entries[key]
            if default is None:
                raise KeyError(key)
            return default
        return tuple(build(prefix + (i,)) for i in range(dims[depth]))

    for key in entries:
        if len(key) != len(dims) or any(not 0 <= k < n for k, n in zip(key, dims)):
            raise IndexError(f"table {decl.name!r}: index {key} outside {dims}")
    return Table(decl, build(()))


@dataclass
class Scope:
    """Names visible to expressions: object types, variables, tables, parameters.

    Object counts and table data may be absent while parsing a domain; they are
    required for compilation.
    """

    objects: dict[str, int | None] = field(default_factory=dict)
    variables: list[Variable] = field(default_factory=list)
    tables: dict[str, TableDecl] = field(default_factory=dict)
    table_data: dict[str, Table] = field(default_factory=dict)
    parameters: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self._index = {v.name: i for i, v in enumerate(self.variables)}

    def add_variable(self, var: Variable) -> None:
        self._check_fresh(var.name)
        self._index[var.name] = len(self.variables)
        self.variables.append(var)

    def add_table(self, decl: TableDecl, table: Table | None = None) -> None:
        self._check_fresh(decl.name)
        self.tables[decl.name] = decl
        if table is not None:
            self.table_data[decl.name] = table

    def _check_fresh(self, name: str) -> None:
        if name in self._index or name in self.tables or name in RESERVED:
            raise ExprTypeError(f"name {name!r} is already declared or reserved")

    def variable(self, name: str) -> Variable:
        return self.variables[self._index[name]]

    def index_of(self, name: str) -> int:
        return self._index[name]

    def has_variable(self, name: str) -> bool:
        return name in self._index

    def count(self, object_name: str) -> int:
        n = self.objects.get(object_name)
        if n is None:
            raise ExprTypeError(f"object type {object_name!r} has no count")
        return n

    def with_parameters(self, params: dict[str, str]) -> Scope:
        scope = Scope(self.objects, self.variables, self.tables, self.table_data,
                      {**self.parameters, **params})
        return scope

    def universe_of(self, name: str) -> str:
        """Object type name of a set variable or object type ``name``."""
        if name in self.objects:
            return name
        if self.has_variable(name) and self.variable(name).kind == SET:
            return self.variable(name).object
        raise ExprTypeError(f"{name!r} is neither an object type nor a set variable")


# ---------------------------------------------------------------------------
# AST


class Expr:
    kind: str = ""

    def children(self) -> tuple[Expr, ...]:
        return ()

    def walk(self) -> Iterator[Expr]:
        yield self
        for child in self.children():
            yield from child.walk()

    def __str__(self) -> str:
        return to_text(self)


def _need(expr: Expr, kind: str, where: str) -> None:
    if not isinstance(expr, Expr) or expr.kind != kind:
        got = getattr(expr, "kind", type(expr).__name__)
        raise ExprTypeError(f"{where}: expected {kind} expression, got {got}")


# element -------------------------------------------------------------------


@dataclass(frozen=True)
class ElementConst(Expr):
    value: int
    kind = ELEMENT

    def __post_init__(self):
        if isinstance(self.value, bool) or not isinstance(self.value, int) or self.value < 0:
            raise ExprTypeError(f"element literal must be a nonnegative int, got {self.value!r}")


@dataclass(frozen=True)
class ElementVar(Expr):
    name: str
    kind = ELEMENT


@dataclass(frozen=True)
class Param(Expr):
    """An element-valued transition parameter or quantified variable."""

    name: str
    kind = ELEMENT


@dataclass(frozen=True)
class ElementTable(Expr):
    table: str
    args: tuple[Expr, ...]
    kind = ELEMENT

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        for a in self.args:
            _need(a, ELEMENT, f"index of {self.table}")

    def children(self):
        return self.args


ELEMENT_OPS = ("+", "-", "min", "max")


@dataclass(frozen=True)
class ElementOp(Expr):
    op: str
    left: Expr
    right: Expr
    kind = ELEMENT

    def __post_init__(self):
        if self.op not in ELEMENT_OPS:
            raise ExprTypeError(f"bad element operator {self.op!r}")
        _need(self.left, ELEMENT, self.op)
        _need(self.right, ELEMENT, self.op)

    def children(self):
        return (self.left, self.right)


# set -----------------------------------------------------------------------


@dataclass(frozen=True)
class SetConst(Expr):
    object: str
    values: frozenset
    kind = SET

    def __post_init__(self):
        object.__setattr__(self, "values", frozenset(self.values))
        if any(isinstance(v, bool) or not isinstance(v, int) or v < 0 for v in self.values):
            raise ExprTypeError("set literal members must be nonnegative ints")


@dataclass(frozen=True)
class SetVar(Expr):
    name: str
    kind = SET


@dataclass(frozen=True)
class SetTable(Expr):
    table: str
    args: tuple[Expr, ...]
    kind = SET

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        for a in self.args:
            _need(a, ELEMENT, f"index of {self.table}")

    def children(self):
        return self.args


@dataclass(frozen=True)
class SetElementOp(Expr):
    """``add`` or ``remove`` an element."""

    op: str
    set: Expr
    element: Expr
    kind = SET

    def __post_init__(self):
        if self.op not in ("add", "remove"):
            raise ExprTypeError(f"bad set-element operator {self.op!r}")
        _need(self.set, SET, self.op)
        _need(self.element, ELEMENT, self.op)

    def children(self):
        return (self.element, self.set)


SET_OPS = ("union", "intersection", "difference")


@dataclass(frozen=True)
class SetOp(Expr):
    op: str
    left: Expr
    right: Expr
    kind = SET

    def __post_init__(self):
        if self.op not in SET_OPS:
            raise ExprTypeError(f"bad set operator {self.op!r}")
        _need(self.left, SET, self.op)
        _need(self.right, SET, self.op)

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Complement(Expr):
    set: Expr
    kind = SET

    def __post_init__(self):
        _need(self.set, SET, "complement")

    def children(self):
        return (self.set,)


# numeric -------------------------------------------------------------------


@dataclass(frozen=True)
class NumConst(Expr):
    value: Number
    kind = NUMERIC

    def __post_init__(self):
        if isinstance(self.value, bool) or not isinstance(self.value, (int, float, Fraction)):
            raise ExprTypeError(f"numeric literal expected, got {self.value!r}")
        if isinstance(self.value, Fraction) and self.value.denominator == 1:
            object.__setattr__(self, "value", int(self.value))


@dataclass(frozen=True)
class NumVar(Expr):
    name: str
    kind = NUMERIC


@dataclass(frozen=True)
class NumTable(Expr):
    table: str
    args: tuple[Expr, ...]
    kind = NUMERIC

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        for a in self.args:
            _need(a, ELEMENT, f"index of {self.table}")

    def children(self):
        return self.args


NUMERIC_OPS = ("+", "-", "*", "/", "min", "max")


@dataclass(frozen=True)
class NumOp(Expr):
    op: str
    left: Expr
    right: Expr
    kind = NUMERIC

    def __post_init__(self):
        if self.op not in NUMERIC_OPS:
            raise ExprTypeError(f"bad numeric operator {self.op!r}")
        _need(self.left, NUMERIC, self.op)
        _need(self.right, NUMERIC, self.op)

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Round(Expr):
    """``ceil`` or ``floor``; always yields an int."""

    op: str
    arg: Expr
    kind = NUMERIC

    def __post_init__(self):
        if self.op not in ("ceil", "floor"):
            raise ExprTypeError(f"bad rounding operator {self.op!r}")
        _need(self.arg, NUMERIC, self.op)

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class Cardinality(Expr):
    set: Expr
    kind = NUMERIC

    def __post_init__(self):
        _need(self.set, SET, "card")

    def children(self):
        return (self.set,)


@dataclass(frozen=True)
class TableSum(Expr):
    """Sum of a numeric table over the product of its index positions.

    Each position is an element expression (fixed index) or a set expression
    (summed over its members); at least one position is a set.
    """

    table: str
    args: tuple[Expr, ...]
    kind = NUMERIC

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if not any(isinstance(a, Expr) and a.kind == SET for a in self.args):
            raise ExprTypeError(f"sum over {self.table} needs a set position")
        for a in self.args:
            if not isinstance(a, Expr) or a.kind not in (ELEMENT, SET):
                raise ExprTypeError(f"sum over {self.table}: bad index {a!r}")

    def children(self):
        return self.args


@dataclass(frozen=True)
class IfThenElse(Expr):
    cond: Expr
    then: Expr
    other: Expr
    kind = NUMERIC

    def __post_init__(self):
        _need(self.cond, BOOL, "if")
        _need(self.then, NUMERIC, "if")
        _need(self.other, NUMERIC, "if")

    def children(self):
        return (self.cond, self.then, self.other)


@dataclass(frozen=True)
class CostRef(Expr):
    """Placeholder for the value of the successor state in a cost expression."""

    kind = NUMERIC


@dataclass(frozen=True)
class ToNumeric(Expr):
    """An element expression used as a number."""

    arg: Expr
    kind = NUMERIC

    def __post_init__(self):
        _need(self.arg, ELEMENT, "numeric conversion")

    def children(self):
        return (self.arg,)


# conditions ----------------------------------------------------------------


@dataclass(frozen=True)
class BoolConst(Expr):
    value: bool
    kind = BOOL


@dataclass(frozen=True)
class BoolTable(Expr):
    table: str
    args: tuple[Expr, ...]
    kind = BOOL

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        for a in self.args:
            _need(a, ELEMENT, f"index of {self.table}")

    def children(self):
        return self.args


COMPARE_OPS = ("=", "!=", "<", "<=", ">", ">=")


def _is_weak_numeric(e: Expr) -> bool:
    """True for numeric nodes whose text reads like an element."""
    return isinstance(e, ToNumeric) or (
        isinstance(e, NumConst) and isinstance(e.value, int) and e.value >= 0
    )


def _as_element(e: Expr) -> Expr:
    if isinstance(e, ToNumeric):
        return e.arg
    if isinstance(e, NumConst):
        return ElementConst(e.value)
    return e


def _as_numeric(e: Expr) -> Expr:
    if isinstance(e, ElementConst):
        return NumConst(e.value)
    if e.kind == ELEMENT:
        return ToNumeric(e)
    return e


@dataclass(frozen=True)
class Compare(Expr):
    """Comparison of two element, numeric or set expressions.

    Operands are normalized so that the textual form determines the operand
    kind: numeric comparisons need a genuinely numeric side, element
    comparisons need an element-typed side, two literals compare as numbers.
    """

    op: str
    left: Expr
    right: Expr
    kind = BOOL

    def __post_init__(self):
        if self.op not in COMPARE_OPS:
            raise ExprTypeError(f"bad comparison {self.op!r}")
        l, r = self.left, self.right
        kinds = {l.kind, r.kind}
        if SET in kinds:
            if kinds != {SET} or self.op not in ("=", "!="):
                raise ExprTypeError(f"sets only support = and != (got {self.op!r})")
            return
        if BOOL in kinds:
            raise ExprTypeError("cannot compare conditions")
        lit = (ElementConst, NumConst)
        if isinstance(l, lit) and isinstance(r, lit):
            l, r = _as_numeric(l), _as_numeric(r)
        elif all(_is_weak_numeric(x) or x.kind == ELEMENT for x in (l, r)) and not (
            isinstance(l, NumConst) and isinstance(r, NumConst)
        ):
            l, r = _as_element(l), _as_element(r)
        else:
            l, r = _as_numeric(l), _as_numeric(r)
        object.__setattr__(self, "left", l)
        object.__setattr__(self, "right", r)

    @property
    def operand_kind(self) -> str:
        return self.left.kind

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class IsIn(Expr):
    element: Expr
    set: Expr
    kind = BOOL

    def __post_init__(self):
        _need(self.element, ELEMENT, "is_in")
        _need(self.set, SET, "is_in")

    def children(self):
        return (self.element, self.set)


@dataclass(frozen=True)
class IsSubset(Expr):
    left: Expr
    right: Expr
    kind = BOOL

    def __post_init__(self):
        _need(self.left, SET, "is_subset")
        _need(self.right, SET, "is_subset")

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class IsEmpty(Expr):
    set: Expr
    kind = BOOL

    def __post_init__(self):
        _need(self.set, SET, "is_empty")

    def children(self):
        return (self.set,)


@dataclass(frozen=True)
class Not(Expr):
    arg: Expr
    kind = BOOL

    def __post_init__(self):
        _need(self.arg, BOOL, "not")

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class And(Expr):
    args: tuple[Expr, ...]
    kind = BOOL

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        for a in self.args:
            _need(a, BOOL, "and")

    def children(self):
        return self.args


@dataclass(frozen=True)
class Or(Expr):
    args: tuple[Expr, ...]
    kind = BOOL

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        for a in self.args:
            _need(a, BOOL, "or")

    def children(self):
        return self.args


@dataclass(frozen=True)
class Forall(Expr):
    """``body`` holds for every member ``param`` of the set ``universe``.

    Quantification happens at evaluation time, so ``universe`` may depend on
    the state.
    """

    param: str
    universe: Expr
    body: Expr
    kind = BOOL

    def __post_init__(self):
        _need(self.universe, SET, "forall")
        _need(self.body, BOOL, "forall")

    def children(self):
        return (self.universe, self.body)


TRUE = BoolConst(True)
FALSE = BoolConst(False)

RESERVED = frozenset({
    "cost", "true", "false", "if", "sum", "card", "ceil", "floor", "min", "max",
    "and", "or", "not", "is_in", "is_subset", "is_empty", "add", "remove",
    "union", "intersection", "difference", "complement", "set", "forall",
    "numeric",
})


# ---------------------------------------------------------------------------
# structural helpers


def contains_cost(expr: Expr) -> bool:
    return any(isinstance(e, CostRef) for e in expr.walk())


def substitute(expr: Expr, values: dict[str, int]) -> Expr:
    """Replace parameters by element literals."""
    if isinstance(expr, Param):
        if expr.name in values:
            return ElementConst(values[expr.name])
        return expr
    if isinstance(expr, Forall):
        inner = {k: v for k, v in values.items() if k != expr.param}
        return Forall(expr.param, substitute(expr.universe, values), substitute(expr.body, inner))
    if not expr.children():
        return expr
    return _rebuild(expr, [substitute(c, values) for c in expr.children()])


def _rebuild(expr: Expr, kids: list[Expr]) -> Expr:
    if isinstance(expr, (ElementTable, SetTable, NumTable, BoolTable, TableSum)):
        return type(expr)(expr.table, tuple(kids))
    if isinstance(expr, (ElementOp, SetOp, NumOp, Compare)):
        return type(expr)(expr.op, kids[0], kids[1])
    if isinstance(expr, SetElementOp):
        return SetElementOp(expr.op, kids[1], kids[0])
    if isinstance(expr, Round):
        return Round(expr.op, kids[0])
    if isinstance(expr, (Complement, Cardinality, IsEmpty)):
        return type(expr)(kids[0])
    if isinstance(expr, (ToNumeric, Not)):
        return type(expr)(kids[0])
    if isinstance(expr, IfThenElse):
        return IfThenElse(*kids)
    if isinstance(expr, (IsIn, IsSubset)):
        return type(expr)(kids[0], kids[1])
    if isinstance(expr, (And, Or)):
        return type(expr)(tuple(kids))
    raise ExprTypeError(f"cannot rebuild {type(expr).__name__}")


def referenced_names(expr: Expr) -> tuple[set[str], set[str], set[str]]:
    """Return (variables, tables, free parameters) referenced by ``expr``."""
    variables: set[str] = set()
    tables: set[str] = set()
    params: set[str] = set()

    def visit(e: Expr, bound: frozenset):
        if isinstance(e, (ElementVar, SetVar, NumVar)):
            variables.add(e.name)
        elif isinstance(e, Param):
            if e.name not in bound:
                params.add(e.name)
        elif hasattr(e, "table"):
            tables.add(e.table)
        if isinstance(e, Forall):
            visit(e.universe, bound)
            visit(e.body, bound | {e.param})
            return
        for c in e.children():
            visit(c, bound)

    visit(expr, frozenset())
    return variables, tables, params


def set_object(expr: Expr, scope: Scope) -> str:
    """Object type whose universe ``expr`` ranges over."""
    if isinstance(expr, SetConst):
        return expr.object
    if isinstance(expr, SetVar):
        return scope.variable(expr.name).object
    if isinstance(expr, SetTable):
        return scope.tables[expr.table].object
    if isinstance(expr, SetElementOp):
        return set_object(expr.set, scope)
    if isinstance(expr, (SetOp,)):
        return set_object(expr.left, scope)
    if isinstance(expr, Complement):
        return set_object(expr.set, scope)
    raise ExprTypeError(f"not a set expression: {expr!r}")


# ---------------------------------------------------------------------------
# compilation


def _div(a, b):
    if b == 0:
        raise EvalError("division by zero")
    if isinstance(a, float) or isinstance(b, float):
        return a / b
    return Fraction(a) / b


_BINARY = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": _div,
    "min": min,
    "max": max,
}

_COMPARE = {
    "=": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


def _table_accessor(scope: Scope, name: str, arg_fns: list[Callable]):
    try:
        table = scope.table_data[name]
    except KeyError:
        raise ExprTypeError(f"table {name!r} has no values") from None
    data = table.data
    dims = [scope.count(o) for o in table.decl.args]
    if len(arg_fns) != len(dims):
        raise ExprTypeError(f"table {name!r} expects {len(dims)} indices, got {len(arg_fns)}")
    if not arg_fns:
        return lambda s, v: data
    if len(arg_fns) == 1:
        (f,), (n,) = arg_fns, dims

        def access1(s, v):
            i = f(s, v)
            if not 0 <= i < n:
                raise EvalError(f"index {i} out of range for table {name!r}")
            return data[i]

        return access1
    if len(arg_fns) == 2:
        (f, g), (n, m) = arg_fns, dims

        def access2(s, v):
            i, j = f(s, v), g(s, v)
            if not (0 <= i < n and 0 <= j < m):
                raise EvalError(f"index ({i}, {j}) out of range for table {name!r}")
            return data[i][j]

        return access2

    def access(s, v):
        value = data
        for f, n in zip(arg_fns, dims):
            i = f(s, v)
            if not 0 <= i < n:
                raise EvalError(f"index {i} out of range for table {name!r}")
            value = value[i]
        return value

    return access


def compile_expr(expr: Expr, scope: Scope) -> Callable:
    """Compile ``expr`` into a closure ``f(state, cost_value)``."""
    c = lambda e: compile_expr(e, scope)  # noqa: E731

    if isinstance(expr, (ElementConst, NumConst, BoolConst)):
        value = expr.value
        return lambda s, v: value
    if isinstance(expr, (ElementVar, SetVar, NumVar)):
        if not scope.has_variable(expr.name):
            raise ExprTypeError(f"undeclared variable {expr.name!r}")
        idx = scope.index_of(expr.name)
        return lambda s, v: s[idx]
    if isinstance(expr, Param):
        raise ExprTypeError(f"unbound parameter {expr.name!r}")
    if isinstance(expr, SetConst):
        n = scope.count(expr.object)
        if any(x >= n for x in expr.values):
            raise ExprTypeError(f"set literal exceeds object type {expr.object!r}")
        mask = to_mask(expr.values)
        return lambda s, v: mask
    if isinstance(expr, (ElementTable, SetTable, NumTable, BoolTable)):
        return _table_accessor(scope, expr.table, [c(a) for a in expr.args])
    if isinstance(expr, ElementOp):
        f, g, op = c(expr.left), c(expr.right), _BINARY[expr.op]
        if expr.op == "-":
            def sub(s, v):
                r = f(s, v) - g(s, v)
                if r < 0:
                    raise EvalError("negative element value")
                return r
            return sub
        return lambda s, v: op(f(s, v), g(s, v))
    if isinstance(expr, SetElementOp):
        fs, fe = c(expr.set), c(expr.element)
        n = scope.count(set_object(expr.set, scope))

        def bit(s, v):
            i = fe(s, v)
            if not 0 <= i < n:
                raise EvalError(f"element {i} outside set universe of size {n}")
            return 1 << i

        if expr.op == "add":
            return lambda s, v: fs(s, v) | bit(s, v)
        return lambda s, v: fs(s, v) & ~bit(s, v)
    if isinstance(expr, SetOp):
        f, g = c(expr.left), c(expr.right)
        if expr.op == "union":
            return lambda s, v: f(s, v) | g(s, v)
        if expr.op == "intersection":
            return lambda s, v: f(s, v) & g(s, v)
        return lambda s, v: f(s, v) & ~g(s, v)
    if isinstance(expr, Complement):
        f = c(expr.set)
        full = (1 << scope.count(set_object(expr.set, scope))) - 1
        return lambda s, v: full & ~f(s, v)
    if isinstance(expr, NumOp):
        f, g, op = c(expr.left), c(expr.right), _BINARY[expr.op]
        if expr.op == "+":
            return lambda s, v: f(s, v) + g(s, v)
        return lambda s, v: op(f(s, v), g(s, v))
    if isinstance(expr, Round):
        f = c(expr.arg)
        rnd = math.ceil if expr.op == "ceil" else math.floor
        return lambda s, v: rnd(f(s, v))
    if isinstance(expr, Cardinality):
        f = c(expr.set)
        return lambda s, v: f(s, v).bit_count()
    if isinstance(expr, TableSum):
        return _compile_sum(expr, scope)
    if isinstance(expr, IfThenElse):
        p, f, g = c(expr.cond), c(expr.then), c(expr.other)
        return lambda s, v: f(s, v) if p(s, v) else g(s, v)
    if isinstance(expr, CostRef):
        def cost(s, v):
            if v is None:
                raise EvalError("cost placeholder evaluated outside a cost expression")
            return v
        return cost
    if isinstance(expr, ToNumeric):
        return c(expr.arg)
    if isinstance(expr, Compare):
        f, g, op = c(expr.left), c(expr.right), _COMPARE[expr.op]
        if expr.op == "<=":
            return lambda s, v: f(s, v) <= g(s, v)
        return lambda s, v: op(f(s, v), g(s, v))
    if isinstance(expr, IsIn):
        fe, fs = c(expr.element), c(expr.set)
        return lambda s, v: (fs(s, v) >> fe(s, v)) & 1 == 1
    if isinstance(expr, IsSubset):
        f, g = c(expr.left), c(expr.right)
        return lambda s, v: f(s, v) & ~g(s, v) == 0
    if isinstance(expr, IsEmpty):
        f = c(expr.set)
        return lambda s, v: f(s, v) == 0
    if isinstance(expr, Not):
        f = c(expr.arg)
        return lambda s, v: not f(s, v)
    if isinstance(expr, And):
        fns = [c(a) for a in expr.args]
        if len(fns) == 2:
            f, g = fns
            return lambda s, v: f(s, v) and g(s, v)
        return lambda s, v: all(f(s, v) for f in fns)
    if isinstance(expr, Or):
        fns = [c(a) for a in expr.args]
        return lambda s, v: any(f(s, v) for f in fns)
    if isinstance(expr, Forall):
        universe = c(expr.universe)
        n = scope.count(set_object(expr.universe, scope))
        bodies = [c(substitute(expr.body, {expr.param: j})) for j in range(n)]

        def forall(s, v):
            for j in members(universe(s, v)):
                if not bodies[j](s, v):
                    return False
            return True

        return forall
    raise ExprTypeError(f"cannot compile {type(expr).__name__}")


def _compile_sum(expr: TableSum, scope: Scope) -> Callable:
    table = scope.table_data.get(expr.table)
    if table is None:
        raise ExprTypeError(f"table {expr.table!r} has no values")
    decl = table.decl
    if decl.kind != NUMERIC:
        raise ExprTypeError(f"sum over non-numeric table {expr.table!r}")
    if len(expr.args) != decl.arity:
        raise ExprTypeError(f"table {expr.table!r} expects {decl.arity} indices")
    data = table.data
    dims = [scope.count(o) for o in decl.args]
    fns = [compile_expr(a, scope) for a in expr.args]
    is_set = [a.kind == SET for a in expr.args]

    if decl.arity == 1:
        f = fns[0]
        n = dims[0]

        def sum1(s, v):
            mask = f(s, v)
            if mask >> n:
                raise EvalError(f"set index out of range for table {expr.table!r}")
            total = 0
            for i in members(mask):
                total += data[i]
            return total

        return sum1

    def indices(pos, s, v):
        x = fns[pos](s, v)
        n = dims[pos]
        if is_set[pos]:
            if x >> n:
                raise EvalError(f"set index out of range for table {expr.table!r}")
            return list(members(x))
        if not 0 <= x < n:
            raise EvalError(f"index {x} out of range for table {expr.table!r}")
        return [x]

    if decl.arity == 2:
        def sum2(s, v):
            rows, cols = indices(0, s, v), indices(1, s, v)
            total = 0
            for i in rows:
                row = data[i]
                for j in cols:
                    total += row[j]
            return total

        return sum2

    def sumk(s, v):
        total = 0
        stack = [(data, 0)]
        lists = [indices(p, s, v) for p in range(decl.arity)]
        while stack:
            node, depth = stack.pop()
            if depth == decl.arity:
                total += node
                continue
            for i in lists[depth]:
                stack.append((node[i], depth + 1))
        return total

    return sumk


def evaluate(expr: Expr, state, scope: Scope, cost=None):
    """Evaluate ``expr`` in ``state`` (a tuple ordered like ``scope.variables``)."""
    return compile_expr(expr, scope)(state, cost)


def eval_numeric(expr: Expr, state, scope: Scope, cost=None) -> Number:
    _need(expr, NUMERIC, "eval_numeric")
    return evaluate(expr, state, scope, cost)


def eval_element(expr: Expr, state, scope: Scope) -> int:
    _need(expr, ELEMENT, "eval_element")
    return evaluate(expr, state, scope)


def eval_set(expr: Expr, state, scope: Scope) -> int:
    _need(expr, SET, "eval_set")
    return evaluate(expr, state, scope)


def eval_condition(expr: Expr, state, scope: Scope) -> bool:
    _need(expr, BOOL, "eval_condition")
    return bool(evaluate(expr, state, scope))


# ---------------------------------------------------------------------------
# printing


def _num_text(value: Number) -> str:
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isinf(value):
            raise ExprTypeError("infinite literals cannot be printed")
        text = repr(value)
        return text if "." in text or "e" in text else text + ".0"
    # Fraction with a terminating decimal expansion prints as a decimal.
    den = value.denominator
    while den % 2 == 0:
        den //= 2
    while den % 5 == 0:
        den //= 5
    if den == 1:
        digits = 0
        scaled = value
        while scaled.denominator != 1:
            scaled *= 10
            digits += 1
        sign = "-" if scaled < 0 else ""
        body = str(abs(scaled.numerator)).rjust(digits + 1, "0")
        return f"{sign}{body[:-digits]}.{body[-digits:]}"
    return f"{value.numerator}/{value.denominator}"


def to_text(expr: Expr) -> str:
    """Canonical s-expression text for ``expr``."""
    t = to_text
    if isinstance(expr, (ElementConst,)):
        return str(expr.value)
    if isinstance(expr, NumConst):
        return _num_text(expr.value)
    if isinstance(expr, BoolConst):
        return "true" if expr.value else "false"
    if isinstance(expr, (ElementVar, SetVar, NumVar, Param)):
        return expr.name
    if isinstance(expr, (ElementTable, SetTable, NumTable, BoolTable)):
        if not expr.args:
            return expr.table
        return "(" + " ".join([expr.table] + [t(a) for a in expr.args]) + ")"
    if isinstance(expr, (ElementOp, NumOp, SetOp, Compare)):
        return f"({expr.op} {t(expr.left)} {t(expr.right)})"
    if isinstance(expr, SetElementOp):
        return f"({expr.op} {t(expr.element)} {t(expr.set)})"
    if isinstance(expr, SetConst):
        items = " ".join(str(x) for x in sorted(expr.values))
        return f"(set {expr.object}{' ' + items if items else ''})"
    if isinstance(expr, Complement):
        return "~" + t(expr.set)
    if isinstance(expr, Round):
        return f"({expr.op} {t(expr.arg)})"
    if isinstance(expr, Cardinality):
        return f"(card {t(expr.set)})"
    if isinstance(expr, TableSum):
        return "(" + " ".join(["sum", expr.table] + [t(a) for a in expr.args]) + ")"
    if isinstance(expr, IfThenElse):
        return f"(if {t(expr.cond)} {t(expr.then)} {t(expr.other)})"
    if isinstance(expr, CostRef):
        return "cost"
    if isinstance(expr, ToNumeric):
        if isinstance(expr.arg, (ElementVar, Param, ElementTable)):
            return t(expr.arg)
        return f"(numeric {t(expr.arg)})"
    if isinstance(expr, IsIn):
        return f"(is_in {t(expr.element)} {t(expr.set)})"
    if isinstance(expr, IsSubset):
        return f"(is_subset {t(expr.left)} {t(expr.right)})"
    if isinstance(expr, IsEmpty):
        return f"(is_empty {t(expr.set)})"
    if isinstance(expr, Not):
        return f"(not {t(expr.arg)})"
    if isinstance(expr, (And, Or)):
        name = "and" if isinstance(expr, And) else "or"
        return "(" + " ".join([name] + [t(a) for a in expr.args]) + ")"
    if isinstance(expr, Forall):
        return f"(forall ({expr.param} {t(expr.universe)}) {t(expr.body)})"
    raise ExprTypeError(f"cannot print {type(expr).__name__}")
