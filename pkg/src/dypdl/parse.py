"""Parser for the LISP-like expression syntax.

Grammar: parenthesized prefix notation, whitespace-separated tokens, ``~X``
as shorthand for ``(complement X)``.  Numeric literals are decimal integers,
decimals (parsed exactly as fractions) or ``p/q`` rationals.  The expected
kind is pushed down from the caller; bare integers are elements or numbers
depending on where they appear.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from . import expr as ex
from .expr import BOOL, ELEMENT, NUMERIC, SET, Expr, Scope

_TOKEN = re.compile(r"\s*(?:(\()|(\))|(~)|([^\s()~]+))")
_INT = re.compile(r"-?\d+$")
_DECIMAL = re.compile(r"-?\d+\.\d+$")
_RATIONAL = re.compile(r"-?\d+/\d+$")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_\-]*$")


class ParseError(ValueError):
    """Malformed or ill-typed expression text."""

    def __init__(self, position: int, reason: str):
        super().__init__(f"at {position}: {reason}")
        self.position = position
        self.reason = reason


@dataclass(frozen=True)
class Atom:
    text: str
    pos: int


@dataclass(frozen=True)
class Group:
    items: tuple
    pos: int

    @property
    def head(self) -> str | None:
        if self.items and isinstance(self.items[0], Atom):
            return self.items[0].text
        return None


def read(text: str):
    """Read ``text`` into nested ``Group``/``Atom`` nodes."""
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise ParseError(pos, f"unexpected character {text[pos]!r}")
        start = m.start(m.lastindex)
        tokens.append((m.group(m.lastindex), m.lastindex, start))
        pos = m.end()

    idx = 0

    def parse_one():
        nonlocal idx
        if idx >= len(tokens):
            raise ParseError(len(text), "unexpected end of expression")
        value, kind, at = tokens[idx]
        idx += 1
        if kind == 1:
            items = []
            while True:
                if idx >= len(tokens):
                    raise ParseError(at, "unbalanced '('")
                if tokens[idx][1] == 2:
                    idx += 1
                    return Group(tuple(items), at)
                items.append(parse_one())
        if kind == 2:
            raise ParseError(at, "unexpected ')'")
        if kind == 3:
            inner = parse_one()
            return Group((Atom("complement", at), inner), at)
        return Atom(value, at)

    node = parse_one()
    if idx != len(tokens):
        raise ParseError(tokens[idx][2], "trailing tokens after expression")
    return node


def _number(text: str):
    if _INT.match(text):
        return int(text)
    if _DECIMAL.match(text) or _RATIONAL.match(text):
        return Fraction(text)
    return None


_ARITH = {"+", "-", "*", "/", "min", "max"}
_SET_HEADS = {"add", "remove", "union", "intersection", "difference", "complement", "set"}
_BOOL_HEADS = {"=", "!=", "<", "<=", ">", ">=", "is_in", "is_subset", "is_empty",
               "not", "and", "or", "forall"}
_NUM_HEADS = {"ceil", "floor", "card", "sum", "if", "numeric"}


class _Builder:
    def __init__(self, scope: Scope):
        self.scope = scope
        self.bound: list[str] = []

    # kind inference -------------------------------------------------------

    def infer(self, node) -> str | None:
        """Kind of ``node``; ``None`` for bare nonnegative integers."""
        if isinstance(node, Atom):
            t = node.text
            num = _number(t)
            if num is not None:
                if isinstance(num, int) and num >= 0:
                    return None
                return NUMERIC
            if t in ("true", "false"):
                return BOOL
            if t == "cost":
                return NUMERIC
            return self._name_kind(node)
        head = node.head
        if head is None:
            raise ParseError(node.pos, "expression must start with an operator or table name")
        if head in _ARITH:
            kinds = {self.infer(a) for a in node.items[1:]}
            if NUMERIC in kinds:
                return NUMERIC
            if head in ("*", "/"):
                return NUMERIC
            if ELEMENT in kinds:
                return ELEMENT
            return None
        if head in _SET_HEADS:
            return SET
        if head in _BOOL_HEADS:
            return BOOL
        if head in _NUM_HEADS:
            return NUMERIC
        if head in self.scope.tables:
            return self.scope.tables[head].kind
        raise ParseError(node.pos, f"unknown operator or table {head!r}")

    def _name_kind(self, atom: Atom) -> str:
        t = atom.text
        if t in self.bound or t in self.scope.parameters:
            return ELEMENT
        if self.scope.has_variable(t):
            return self.scope.variable(t).kind
        if t in self.scope.tables:
            decl = self.scope.tables[t]
            if decl.arity:
                raise ParseError(atom.pos, f"table {t!r} needs {decl.arity} indices")
            return decl.kind
        raise ParseError(atom.pos, f"unknown identifier {t!r}")

    # building ---------------------------------------------------------------

    def build(self, node, kind: str) -> Expr:
        if isinstance(node, Atom):
            return self._atom(node, kind)
        head = node.head
        args = node.items[1:]
        if head is None:
            raise ParseError(node.pos, "expression must start with an operator or table name")
        if head in self.scope.tables and head not in ex.RESERVED:
            return self._table(node, kind)
        method = {
            ELEMENT: self._element_op,
            SET: self._set_op,
            NUMERIC: self._numeric_op,
            BOOL: self._condition,
        }[kind]
        return method(node, head, args)

    def _atom(self, atom: Atom, kind: str) -> Expr:
        t = atom.text
        num = _number(t)
        if num is not None:
            if kind == ELEMENT:
                if not isinstance(num, int) or num < 0:
                    raise ParseError(atom.pos, f"element literal must be a nonnegative integer: {t}")
                return ex.ElementConst(num)
            if kind == NUMERIC:
                return ex.NumConst(num)
            raise ParseError(atom.pos, f"number {t} where a {kind} expression is expected")
        if t in ("true", "false"):
            if kind != BOOL:
                raise ParseError(atom.pos, f"boolean literal where a {kind} expression is expected")
            return ex.BoolConst(t == "true")
        if t == "cost":
            if kind != NUMERIC:
                raise ParseError(atom.pos, "cost placeholder is numeric")
            return ex.CostRef()
        if not _IDENT.match(t):
            raise ParseError(atom.pos, f"malformed token {t!r}")
        found = self._name_kind(atom)
        if t in self.bound or t in self.scope.parameters:
            node: Expr = ex.Param(t)
        elif self.scope.has_variable(t):
            node = {ELEMENT: ex.ElementVar, SET: ex.SetVar, NUMERIC: ex.NumVar}[found](t)
        else:
            node = self._table_node(t, found, ())
        return self._coerce(node, kind, atom.pos)

    def _coerce(self, node: Expr, kind: str, pos: int) -> Expr:
        if node.kind == kind:
            return node
        if node.kind == ELEMENT and kind == NUMERIC:
            return ex.ToNumeric(node)
        raise ParseError(pos, f"expected {kind} expression, found {node.kind}")

    def _table_node(self, name: str, kind: str, args: tuple) -> Expr:
        cls = {ELEMENT: ex.ElementTable, SET: ex.SetTable, NUMERIC: ex.NumTable, BOOL: ex.BoolTable}
        return cls[kind](name, args)

    def _table(self, node: Group, kind: str) -> Expr:
        name = node.head
        decl = self.scope.tables[name]
        args = node.items[1:]
        if len(args) != decl.arity:
            raise ParseError(node.pos, f"table {name!r} expects {decl.arity} indices, got {len(args)}")
        built = tuple(self.build(a, ELEMENT) for a in args)
        return self._coerce(self._table_node(name, decl.kind, built), kind, node.pos)

    def _arity(self, node: Group, args, n: int | tuple[int, int | None]):
        lo, hi = (n, n) if isinstance(n, int) else n
        if len(args) < lo or (hi is not None and len(args) > hi):
            want = str(lo) if lo == hi else f"at least {lo}"
            raise ParseError(node.pos, f"{node.head!r} expects {want} arguments, got {len(args)}")

    def _fold(self, node, args, kind, cls):
        self._arity(node, args, (2, None))
        out = cls(node.head, self.build(args[0], kind), self.build(args[1], kind))
        for a in args[2:]:
            out = cls(node.head, out, self.build(a, kind))
        return out

    def _element_op(self, node: Group, head: str, args) -> Expr:
        if head in ex.ELEMENT_OPS:
            return self._fold(node, args, ELEMENT, ex.ElementOp)
        raise ParseError(node.pos, f"{head!r} is not an element expression")

    def _set_op(self, node: Group, head: str, args) -> Expr:
        if head in ("add", "remove"):
            self._arity(node, args, 2)
            return ex.SetElementOp(head, self.build(args[1], SET), self.build(args[0], ELEMENT))
        if head in ex.SET_OPS:
            return self._fold(node, args, SET, ex.SetOp)
        if head == "complement":
            self._arity(node, args, 1)
            return ex.Complement(self.build(args[0], SET))
        if head == "set":
            self._arity(node, args, (1, None))
            obj = args[0]
            if not isinstance(obj, Atom) or obj.text not in self.scope.objects:
                raise ParseError(node.pos, "set literal must name its object type first")
            values = []
            for a in args[1:]:
                num = _number(a.text) if isinstance(a, Atom) else None
                if not isinstance(num, int) or num < 0:
                    raise ParseError(getattr(a, "pos", node.pos), "set literal members must be integers")
                values.append(num)
            return ex.SetConst(obj.text, frozenset(values))
        raise ParseError(node.pos, f"{head!r} is not a set expression")

    def _numeric_op(self, node: Group, head: str, args) -> Expr:
        if head in ex.NUMERIC_OPS:
            return self._fold(node, args, NUMERIC, ex.NumOp)
        if head in ("ceil", "floor"):
            self._arity(node, args, 1)
            return ex.Round(head, self.build(args[0], NUMERIC))
        if head == "card":
            self._arity(node, args, 1)
            return ex.Cardinality(self.build(args[0], SET))
        if head == "if":
            self._arity(node, args, 3)
            return ex.IfThenElse(self.build(args[0], BOOL), self.build(args[1], NUMERIC),
                                 self.build(args[2], NUMERIC))
        if head == "numeric":
            self._arity(node, args, 1)
            return ex.ToNumeric(self.build(args[0], ELEMENT))
        if head == "sum":
            self._arity(node, args, (2, None))
            name = args[0]
            if not isinstance(name, Atom) or name.text not in self.scope.tables:
                raise ParseError(node.pos, "sum needs a table name")
            decl = self.scope.tables[name.text]
            if decl.kind != NUMERIC:
                raise ParseError(name.pos, f"sum over non-numeric table {name.text!r}")
            idx = args[1:]
            if len(idx) != decl.arity:
                raise ParseError(node.pos, f"table {name.text!r} expects {decl.arity} indices")
            built = []
            for a in idx:
                k = self.infer(a)
                built.append(self.build(a, SET if k == SET else ELEMENT))
            try:
                return ex.TableSum(name.text, tuple(built))
            except ex.ExprTypeError as err:
                raise ParseError(node.pos, str(err)) from None
        if head in ex.ELEMENT_OPS:
            return self._fold(node, args, NUMERIC, ex.NumOp)
        raise ParseError(node.pos, f"{head!r} is not a numeric expression")

    def _condition(self, node: Group, head: str, args) -> Expr:
        if head in ex.COMPARE_OPS:
            self._arity(node, args, 2)
            kinds = {self.infer(a) for a in args}
            if BOOL in kinds:
                raise ParseError(node.pos, "cannot compare conditions")
            if SET in kinds:
                kind = SET
                if kinds - {SET}:
                    raise ParseError(node.pos, "cannot compare a set with a non-set")
                if head not in ("=", "!="):
                    raise ParseError(node.pos, "sets only support = and != (use is_subset)")
            elif NUMERIC in kinds:
                kind = NUMERIC
            elif ELEMENT in kinds:
                kind = ELEMENT
            else:
                kind = NUMERIC
            return ex.Compare(head, self.build(args[0], kind), self.build(args[1], kind))
        if head == "is_in":
            self._arity(node, args, 2)
            return ex.IsIn(self.build(args[0], ELEMENT), self.build(args[1], SET))
        if head == "is_subset":
            self._arity(node, args, 2)
            return ex.IsSubset(self.build(args[0], SET), self.build(args[1], SET))
        if head == "is_empty":
            self._arity(node, args, 1)
            return ex.IsEmpty(self.build(args[0], SET))
        if head == "not":
            self._arity(node, args, 1)
            return ex.Not(self.build(args[0], BOOL))
        if head in ("and", "or"):
            cls = ex.And if head == "and" else ex.Or
            return cls(tuple(self.build(a, BOOL) for a in args))
        if head == "forall":
            self._arity(node, args, 2)
            binding = args[0]
            if (not isinstance(binding, Group) or len(binding.items) != 2
                    or not isinstance(binding.items[0], Atom)):
                raise ParseError(node.pos, "forall expects ((name universe) condition)")
            name = binding.items[0].text
            if not _IDENT.match(name) or name in ex.RESERVED:
                raise ParseError(binding.pos, f"bad quantified variable {name!r}")
            universe = self.build(binding.items[1], SET)
            self.bound.append(name)
            try:
                body = self.build(args[1], BOOL)
            finally:
                self.bound.pop()
            return ex.Forall(name, universe, body)
        raise ParseError(node.pos, f"{head!r} is not a condition")


def parse_expression(text: str, kind: str, scope: Scope) -> Expr:
    """Parse ``text`` as an expression of ``kind`` in ``scope``.

    Raises :class:`ParseError` on malformed text, unknown identifiers, arity
    mismatches and kind mismatches.
    """
    if kind not in ex.KINDS:
        raise ValueError(f"unknown expression kind {kind!r}")
    if not isinstance(text, str):
        text = str(text).lower() if isinstance(text, bool) else str(text)
    node = read(text)
    try:
        return _Builder(scope).build(node, kind)
    except ex.ExprTypeError as err:
        raise ParseError(getattr(node, "pos", 0), str(err)) from None
