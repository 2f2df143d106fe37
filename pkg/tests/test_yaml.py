from collections import Counter

import pytest

from dypdl import expr as ex
from dypdl import solve
from dypdl.benchmarks import CLASSES, build, domain_text, generate, tsptw, yaml_model
from dypdl.yaml_io import (
    GroundingError,
    ParseError,
    domain_data,
    dump_domain,
    dump_model,
    load,
    load_domain,
    load_problem,
)

from conftest import TWO_CUSTOMERS

TSPTW = domain_text("tsptw")


def test_tsptw_domain_declarations():
    d = load_domain(TSPTW)
    assert [v.name for v in d.state_variables] == ["U", "i", "t"]
    assert {"a", "b", "c"} <= {t.name for t in d.tables}
    assert d.reduce == "min"
    assert [v.preference for v in d.state_variables] == ["none", "none", "less"]


def test_missing_reduce():
    text = "\n".join(line for line in TSPTW.splitlines() if not line.startswith("reduce"))
    with pytest.raises(ParseError) as info:
        load_domain(text)
    assert info.value.path == "reduce"


def test_unknown_top_level_key():
    with pytest.raises(ParseError):
        load_domain(TSPTW + "\nsolver: astar\n")


def test_parameterized_template_grounds_per_object():
    d = load_domain(TSPTW)
    assert [t.name for t in d.transitions] == ["visit", "return"]
    inst = tsptw.Instance(tuple((0,) * 4 for _ in range(4)), (0,) * 4, (9,) * 4)
    m = load_problem(d, tsptw.problem_yaml(inst))
    visits = [t for t in m.transitions if t.name.startswith("visit")]
    assert [t.name for t in visits] == ["visit 0", "visit 1", "visit 2", "visit 3"]
    for t in visits:
        j = t.parameters[0][1]
        assert t.preconditions[0] == ex.IsIn(ex.ElementConst(j), ex.SetVar("U"))


def test_forall_over_set_variable_stays_quantified():
    m = load(TSPTW, tsptw.problem_yaml(TWO_CUSTOMERS))
    assert len(m.constraints) == 1
    assert isinstance(m.constraints[0], ex.Forall)


def test_forall_over_empty_object_type_is_true():
    domain = """
objects: [thing]
state_variables:
  - {name: x, type: integer}
tables:
  - {name: w, type: integer, args: [thing]}
constraints:
  - condition: (<= (w k) x)
    forall:
      - {name: k, object: thing}
reduce: min
transitions:
  - name: step
    parameters:
      - {name: k, object: thing}
    effects: {x: (+ x 1)}
    cost: (+ 1 cost)
base_cases:
  - [(>= x 0)]
"""
    m = load(domain, "object_numbers: {thing: 0}\ntarget: {x: 0}\ntable_values: {w: []}\n")
    assert m.transitions == []
    assert m.check_constraints(m.target)
    m3 = load(domain, "object_numbers: {thing: 3}\ntarget: {x: 1}\ntable_values: {w: [0, 1, 2]}\n")
    assert len(m3.transitions) == 3 and not m3.check_constraints(m3.target)


def test_redefined_table_with_wrong_arity():
    problem = tsptw.problem_yaml(TWO_CUSTOMERS) + "tables:\n  - {name: a, type: integer, args: [customer, customer]}\n"
    with pytest.raises(ParseError):
        load(TSPTW, problem)


def test_missing_entry_without_default():
    problem = tsptw.problem_yaml(TWO_CUSTOMERS).replace("  a: [0, 0, 0]\n", "  a: {entries: {'1': 3}}\n")
    with pytest.raises(GroundingError):
        load(TSPTW, problem)


def test_sparse_table_with_default():
    problem = tsptw.problem_yaml(TWO_CUSTOMERS).replace("  a: [0, 0, 0]\n", "  a: {default: 0, entries: {'1': 3}}\n")
    m = load(TSPTW, problem)
    assert m.scope.table_data["a"].data == (0, 3, 0)


def test_expression_error_carries_path():
    bad = TSPTW.replace("cost: (+ (c i j) cost)", "cost: (+ (c i) cost)")
    with pytest.raises(ParseError) as info:
        load_domain(bad)
    assert "transitions[0].cost" in str(info.value)


@pytest.mark.parametrize("name", list(CLASSES))
def test_domain_print_parse_fixpoint(name):
    d = load_domain(domain_text(name))
    once = dump_domain(d)
    assert load_domain(once) == d
    assert dump_domain(load_domain(once)) == once
    assert domain_data(load_domain(once)) == domain_data(d)


def test_two_customer_yaml_matches_builder(two_customer_tsptw):
    a = solve(two_customer_tsptw)
    b = solve(load(TSPTW, tsptw.problem_yaml(TWO_CUSTOMERS)))
    assert (a.cost, a.transitions) == (b.cost, b.transitions) == (15, ("visit 1", "visit 2", "return"))


SIZES = {"tsptw": 6, "cvrp": 5, "salbp1": 8, "bin_packing": 8, "mosp": 6, "graph_clear": 6}


@pytest.mark.parametrize("name", list(CLASSES))
def test_class_domain_matches_builder(name):
    for seed in range(20):
        inst = generate(name, SIZES[name], seed)
        a, b = solve(build(name, inst)), solve(yaml_model(name, inst))
        assert a.status == b.status and a.cost == b.cost
        assert Counter(a.transitions or ()) == Counter(b.transitions or ())


@pytest.mark.parametrize("name", list(CLASSES))
def test_dump_model_reloads_identically(name):
    for seed in range(5):
        m = build(name, generate(name, SIZES[name], seed))
        r = load(*dump_model(m))
        assert [t.name for t in r.transitions] == [t.name for t in m.transitions]
        assert r.target == m.target
        a, b = solve(m), solve(r)
        assert (a.cost, a.transitions, a.stats.expanded) == (b.cost, b.transitions, b.stats.expanded)
