import pytest
from hypothesis import given
from hypothesis import strategies as st

from dypdl import Dominance, Model
from dypdl.benchmarks import bin_packing, cvrp, graph_clear, salbp, tsptw
from dypdl.model import validate_model


def names(ts):
    return [t.name for t in ts]


def tsptw_model(a1=0, b1=100, n=2):
    c = ((0, 5, 6), (5, 0, 4), (6, 4, 0))[: n + 1]
    c = tuple(row[: n + 1] for row in c)
    return tsptw.build(tsptw.Instance(c, (0, a1, 0)[: n + 1], (100, b1, 100)[: n + 1]))


# -- applicable_transitions --------------------------------------------------


def test_tsptw_root_transitions():
    m = tsptw_model()
    assert names(m.applicable_transitions(m.state(U=[1, 2], i=0, t=0))) == ["visit 1", "visit 2"]


def test_base_state_has_no_transitions():
    m = tsptw_model()
    s = m.state(U=[], i=0, t=17)
    assert m.applicable_transitions(s) == []
    assert m.is_base(s)


def test_forced_open_suppresses_packing():
    m = bin_packing.build(bin_packing.Instance((6, 5, 5, 3), 10))
    # r = 2 fits nothing, so the smallest unpacked item with index >= k is opened
    s = m.state(U=[1, 2, 3], r=2, k=1)
    ts = m.applicable_transitions(s)
    assert names(ts) == ["open 1"] and ts[0].forced


def test_forced_filter_returns_single_transition():
    m = salbp.build(salbp.generate(6, seed=3))
    for mask in range(2**6):
        for r in (0, 5, 12):
            ts = m.applicable_transitions(m.state(U=mask, r=r))
            if any(t.forced for t in ts):
                assert len(ts) == 1


def test_first_forced_wins():
    m = Model()
    m.add_object_type("o", 1)
    m.add_variable("x", "integer", 0)
    m.add_transition("plain", {"x": "(+ x 1)"}, "(+ 1 cost)")
    m.add_transition("f1", {"x": "(+ x 2)"}, "(+ 1 cost)", forced=True)
    m.add_transition("f2", {"x": "(+ x 3)"}, "(+ 1 cost)", forced=True)
    assert names(m.applicable_transitions(m.target)) == ["f1"]


# -- apply ---------------------------------------------------------------------


def test_visit_waits_for_window():
    m = tsptw_model(a1=8)
    s = m.apply(m.transition("visit 1"), m.state(U=[1, 2], i=0, t=0))
    assert m.describe(s) == {"U": [2], "i": 1, "t": 8}


def test_empty_effects_keep_state():
    m = Model()
    m.add_variable("x", "integer", 3)
    t = m.add_transition("noop", {}, "(+ 1 cost)")
    assert m.apply(t, m.target) == m.target


def test_sweep_adds_node():
    m = graph_clear.build(graph_clear.Instance((1, 1), ((0, 1, 1),)))
    s = m.apply(m.transition("sweep 0"), m.target)
    assert m.describe(s) == {"C": [0]}


def test_effects_are_simultaneous():
    m = Model()
    m.add_variable("x", "integer", 1)
    m.add_variable("y", "integer", 2)
    t = m.add_transition("swap", {"x": "y", "y": "x"}, "(+ 1 cost)")
    assert m.apply(t, m.target) == (2, 1)


@given(st.integers(0, 7), st.integers(0, 2), st.integers(0, 60))
def test_frame_semantics(mask, i, t):
    m = cvrp.build(cvrp.Instance(((0, 5, 6), (5, 0, 4), (6, 4, 0)), (0, 2, 3), 5, 2))
    s = m.state(U=mask & 0b110, i=i, l=t % 6, k=1 + t % 2)
    for tr in m.applicable_transitions(s):
        succ = m.apply(tr, s)
        touched = {v for v, _ in tr.effects}
        for v, before, after in zip(m.variables, s, succ):
            if v.name not in touched:
                assert before == after


# -- base cases, constraints, dual bounds ---------------------------------------


def test_constraint_violation():
    m = tsptw_model(b1=3)
    assert not m.check_constraints(m.state(U=[1], i=0, t=0))


def test_no_constraints_always_hold():
    m = graph_clear.build(graph_clear.generate(4, seed=1))
    assert all(m.check_constraints(m.state(C=mask)) for mask in range(16))


def test_tsptw_bound_is_zero():
    m = tsptw_model()
    assert m.dual_bound(m.target) == 0


def test_salbp_bound_values():
    m = salbp.build(salbp.Instance((6, 5, 5, 3), 10, (frozenset(),) * 4))
    assert m.dual_bound(m.state(U=[0, 1, 2, 3], r=0)) == 2
    assert m.dual_bound(m.state(U=[], r=7)) == 0


def test_bin_packing_root_bound():
    m = bin_packing.build(bin_packing.Instance((6, 5, 5, 3), 10))
    assert m.dual_bound(m.target) == 2


# -- dominance -------------------------------------------------------------------


def test_tsptw_earlier_time_dominates():
    m = tsptw_model()
    a, b = m.state(U=[2], i=1, t=3), m.state(U=[2], i=1, t=5)
    assert m.dominance(a, b) is Dominance.LEFT
    assert m.dominance(b, a) is Dominance.RIGHT
    assert m.dominance(a, a) is Dominance.EQUAL


def test_cvrp_conflicting_resources():
    m = cvrp.build(cvrp.Instance(((0, 5, 6), (5, 0, 4), (6, 4, 0)), (0, 2, 2), 5, 3))
    a, b = m.state(U=[2], i=1, l=2, k=3), m.state(U=[2], i=1, l=4, k=1)
    assert m.dominance(a, b) is Dominance.INCOMPARABLE


def test_different_signature_incomparable():
    m = tsptw_model()
    assert m.dominance(m.state(U=[2], i=1, t=3), m.state(U=[1], i=2, t=5)) is Dominance.INCOMPARABLE


def _better_or_equal(m, a, b):
    return m.dominance(a, b) in (Dominance.LEFT, Dominance.EQUAL)


resources = st.tuples(st.integers(0, 4), st.integers(1, 3))


@given(resources, resources, resources)
def test_dominance_is_partial_order(x, y, z):
    m = cvrp.build(cvrp.Instance(((0, 5, 6), (5, 0, 4), (6, 4, 0)), (0, 2, 2), 5, 3))
    a, b, c = (m.state(U=[2], i=1, l=l, k=k) for l, k in (x, y, z))
    if _better_or_equal(m, a, b) and _better_or_equal(m, b, a):
        assert a == b
    if _better_or_equal(m, a, b) and _better_or_equal(m, b, c):
        assert _better_or_equal(m, a, c)
    flip = {Dominance.LEFT: Dominance.RIGHT, Dominance.RIGHT: Dominance.LEFT}
    rel = m.dominance(a, b)
    assert m.dominance(b, a) is flip.get(rel, rel)


# -- validation -------------------------------------------------------------------


def test_builders_validate_clean():
    assert validate_model(tsptw_model()) == []
    for mod in (cvrp, salbp, bin_packing, graph_clear):
        assert validate_model(mod.build(mod.generate(5, seed=0))) == []


def test_constant_cost_warning():
    m = Model()
    m.add_variable("x", "integer", 0)
    m.add_transition("t", {"x": "(+ x 1)"}, "1")
    diags = m.validate()
    assert [d.severity for d in diags] == ["warning"]
    assert "constant cost expression" in diags[0].message


def test_undeclared_table_is_an_error():
    from dypdl import expr as ex

    m = Model()
    m.add_variable("x", "integer", 0)
    m.add_dual_bound(ex.NumTable("ghost", ()))
    assert any(d.severity == "error" and "ghost" in d.message for d in m.validate())


def test_cost_outside_transition_is_an_error():
    from dypdl import expr as ex

    m = Model()
    m.add_variable("x", "integer", 0)
    m.constraints.append(ex.Compare("<=", ex.CostRef(), ex.NumConst(3)))
    assert any(d.severity == "error" for d in m.validate())
