from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dypdl import expr as ex
from dypdl.expr import BOOL, ELEMENT, NUMERIC, SET, EvalError, eval_condition, eval_numeric, eval_set
from dypdl.parse import ParseError, parse_expression

from conftest import toy_model


@pytest.fixture(scope="module")
def model():
    return toy_model()


def parse(model, text, kind=NUMERIC, **params):
    scope = model.scope.with_parameters(params) if params else model.scope
    return parse_expression(text, kind, scope)


def num(model, text, state=None, **params):
    e = parse(model, text, NUMERIC, **params)
    return eval_numeric(e, model.target if state is None else state, model.scope)


# -- parser ------------------------------------------------------------------


def test_table_access_with_parameter(model):
    e = parse(model, "(c i k)", NUMERIC, k="obj")
    assert isinstance(e, ex.NumTable) and e.table == "c"
    assert eval_numeric(ex.substitute(e, {"k": 3}), model.target, model.scope) == model.scope.table_data["c"].data[0][3]


def test_if_then_else_with_decimal_half():
    from dypdl.benchmarks import salbp

    m = salbp.build(salbp.Instance((6, 5, 5, 3), 10, (frozenset(),) * 4))
    e = parse_expression("(if (>= r (/ c 2.0)) 1 0)", NUMERIC, m.scope)
    assert isinstance(e, ex.IfThenElse)
    assert eval_numeric(e, m.state(r=5), m.scope) == 1
    assert eval_numeric(e, m.state(r=4), m.scope) == 0


def test_additive_identity(model):
    for t in (0, 4, 17):
        s = model.state(t=t)
        assert num(model, "(+ 0 t)", s) == num(model, "t", s) == t


@pytest.mark.parametrize("text, fragment", [
    ("(c i)", "expects 2"),
    ("(+ t", "unbalanced"),
    ("(foo 1 2)", "foo"),
    ("(+ t U)", ""),
    ("nosuch", "nosuch"),
    ("(c i j))", ""),
])
def test_parse_errors(model, text, fragment):
    with pytest.raises(ParseError) as info:
        parse(model, text)
    assert fragment in str(info.value)
    assert info.value.position >= 0


def test_cost_placeholder_parses_as_numeric(model):
    e = parse(model, "(+ (c i j) cost)")
    assert ex.contains_cost(e)
    assert not ex.contains_cost(parse(model, "(c i j)"))


def test_tilde_is_complement(model):
    assert parse(model, "~U", SET) == parse(model, "(complement U)", SET)


# -- evaluation ----------------------------------------------------------------


def test_sum_over_set():
    m = toy_model(3)
    m.add_table("tt", "integer", [2, 3, 5], args=["obj"])
    assert num(m, "(sum tt U)", m.state(U=[0, 2])) == 7


def test_tsptw_violation_predicate():
    m = toy_model(2)
    m.add_table("b", "integer", [100, 3], args=["obj"])
    m.add_table("cs", "integer", [[0, 5], [5, 0]], args=["obj", "obj"])
    s = m.state(U=[1], i=0, t=0)
    e = parse(m, "(not (forall (k U) (<= (+ t (cs i k)) (b k))))", BOOL)
    assert eval_condition(e, s, m.scope) is True


def test_mosp_cost_term_identities():
    m = toy_model(3)
    m.add_table("N", "set", [[0, 1], [1], [2]], args=["obj"], object="obj")
    s = m.state(U=[], V=[0, 1, 2])
    e = parse(m, "(card (union (intersection U V) (difference (N 0) U)))")
    assert eval_numeric(e, s, m.scope) == 2


def test_division_is_exact(model):
    assert num(model, "(/ 7 2)") == Fraction(7, 2)
    assert num(model, "(ceil (/ 7 2))") == 4
    assert num(model, "(floor (/ 7 2))") == 3


def test_division_by_zero(model):
    with pytest.raises(EvalError):
        num(model, "(/ t (- r r))")


def test_out_of_range_index(model):
    with pytest.raises(EvalError):
        num(model, "(w (+ i 9))")


def test_two_position_sum(model):
    s = model.state(U=[0, 1], V=[2, 3])
    c = model.scope.table_data["c"].data
    assert num(model, "(sum c U V)", s) == sum(c[a][b] for a in (0, 1) for b in (2, 3))
    assert num(model, "(sum c 1 V)", s) == c[1][2] + c[1][3]


def test_element_table_and_set_table(model):
    s = model.state(i=4)
    assert eval_numeric(parse(model, "(numeric (e i))"), s, model.scope) == 5
    assert sorted(ex.members(eval_set(parse(model, "(P (e i))", SET), s, model.scope))) == [0, 1, 2, 3, 4]


# -- properties ------------------------------------------------------------------

masks = st.integers(min_value=0, max_value=2**6 - 1)


@given(masks, masks)
def test_set_laws(a, b):
    m = toy_model()
    s = m.state(U=a, V=b)
    ev = lambda text: eval_set(parse(m, text, SET), s, m.scope)  # noqa: E731
    assert ev("(union U V)") == ev("(union V U)")
    assert ev("(difference U V)") & ~a == 0
    assert ev("~~U") == a
    assert eval_condition(parse(m, "(is_subset (difference U V) U)", BOOL), s, m.scope)


@given(st.lists(st.integers(-50, 50), min_size=6, max_size=6), masks)
def test_sum_is_fold(values, mask):
    m = toy_model()
    m.add_table("z", "integer", values, args=["obj"])
    s = m.state(U=mask)
    assert num(m, "(sum z U)", s) == sum(values[k] for k in ex.members(mask))


@given(st.integers(0, 100), st.integers(0, 100), masks)
def test_tautological_if(t, r, mask):
    m = toy_model()
    s = m.state(t=t, r=r, U=mask)
    assert num(m, "(if (or (<= t r) (> t r)) (+ t (card U)) 999)", s) == t + bin(mask).count("1")


@given(st.integers(0, 100), masks)
def test_evaluation_is_pure(t, mask):
    m = toy_model()
    s = m.state(t=t, U=mask)
    e = parse(m, "(+ (* t (sum w U)) (/ t 3))")
    assert eval_numeric(e, s, m.scope) == eval_numeric(e, s, m.scope)


# Random expression text drawn from the grammar, then parse -> print -> parse.

elements = st.deferred(lambda: st.one_of(
    st.integers(0, 5).map(str), st.sampled_from(["i", "j"]),
    st.tuples(st.sampled_from(["+", "-", "min", "max"]), elements, elements).map(lambda x: f"({x[0]} {x[1]} {x[2]})"),
    elements.map(lambda x: f"(e {x})"),
))
sets = st.deferred(lambda: st.one_of(
    st.sampled_from(["U", "V", "(set obj)", "(set obj 1 4)"]),
    sets.map(lambda x: f"~{x}" if not x.startswith("~") else f"(complement {x})"),
    st.tuples(st.sampled_from(["add", "remove"]), elements, sets).map(lambda x: f"({x[0]} {x[1]} {x[2]})"),
    st.tuples(st.sampled_from(["union", "intersection", "difference"]), sets, sets).map(
        lambda x: f"({x[0]} {x[1]} {x[2]})"),
    elements.map(lambda x: f"(P {x})"),
))
numbers = st.deferred(lambda: st.one_of(
    st.integers(0, 20).map(str), st.sampled_from(["t", "r", "cap", "2.5", "1/3", "-4"]),
    st.tuples(st.sampled_from(["+", "-", "*", "/", "min", "max"]), numbers, numbers).map(
        lambda x: f"({x[0]} {x[1]} {x[2]})"),
    st.tuples(st.sampled_from(["ceil", "floor"]), numbers).map(lambda x: f"({x[0]} {x[1]})"),
    sets.map(lambda x: f"(card {x})"),
    sets.map(lambda x: f"(sum w {x})"),
    st.tuples(sets, sets).map(lambda x: f"(sum c {x[0]} {x[1]})"),
    st.tuples(elements, elements).map(lambda x: f"(c {x[0]} {x[1]})"),
    elements.map(lambda x: f"(numeric {x})"),
    st.tuples(conditions, numbers, numbers).map(lambda x: f"(if {x[0]} {x[1]} {x[2]})"),
))
conditions = st.deferred(lambda: st.one_of(
    st.tuples(st.sampled_from(["<", "<=", "=", "!=", ">", ">="]), numbers, numbers).map(
        lambda x: f"({x[0]} {x[1]} {x[2]})"),
    st.tuples(st.sampled_from(["=", "!="]), elements, elements).map(lambda x: f"({x[0]} {x[1]} {x[2]})"),
    st.tuples(elements, sets).map(lambda x: f"(is_in {x[0]} {x[1]})"),
    st.tuples(sets, sets).map(lambda x: f"(is_subset {x[0]} {x[1]})"),
    sets.map(lambda x: f"(is_empty {x})"),
    conditions.map(lambda x: f"(not {x})"),
    st.tuples(st.sampled_from(["and", "or"]), conditions, conditions).map(lambda x: f"({x[0]} {x[1]} {x[2]})"),
    conditions.map(lambda x: f"(forall (k U) {x})"),
))


@given(st.one_of(
    numbers.map(lambda x: (x, NUMERIC)), sets.map(lambda x: (x, SET)),
    elements.map(lambda x: (x, ELEMENT)), conditions.map(lambda x: (x, BOOL)),
))
def test_print_parse_round_trip(case):
    text, kind = case
    m = toy_model()
    e = parse(m, text, kind)
    printed = ex.to_text(e)
    assert parse(m, printed, kind) == e
    assert ex.to_text(parse(m, printed, kind)) == printed
