import pytest

from dypdl import Model, solve
from dypdl.benchmarks import build, generate, mosp, salbp, tsptw
from dypdl.oracle import BudgetExceeded, Oracle, Valid, Violation, enumerate_paths, oracle_solve, validate_solution


def test_two_customer_value(two_customer_tsptw):
    res = oracle_solve(two_customer_tsptw)
    assert res.value == 15 and res.feasible


def test_mosp_disjoint():
    assert oracle_solve(mosp.build(mosp.Instance((frozenset({0}), frozenset({1})), 2))).value == 1


def test_target_violating_constraint():
    inst = tsptw.Instance(((0, 5, 6), (5, 0, 4), (6, 4, 0)), (0, 0, 0), (100, 3, 100))
    res = oracle_solve(tsptw.build(inst))
    assert res.value == float("inf") and res.transitions is None


def test_maximization():
    m = Model("max")
    m.add_variable("x", "integer", 0)
    m.add_transition("one", {"x": "(+ x 1)"}, "(+ 1 cost)", preconditions=["(< x 3)"])
    m.add_transition("two", {"x": "(+ x 2)"}, "(+ 5 cost)", preconditions=["(< x 2)"])
    m.add_base_case(["(>= x 3)"])
    # best: one then two (1 + 5) or two then one (5 + 1)
    assert oracle_solve(m).value == 6


def test_self_loop_is_cycle_pruned():
    m = salbp.build(salbp.Instance((11,), 10, (frozenset(),)))
    assert not oracle_solve(m).feasible


def test_budget():
    m = build("cvrp", generate("cvrp", 7, 0))
    with pytest.raises(BudgetExceeded):
        Oracle(m, max_states=10).solve()


def test_validate_solver_output(two_customer_tsptw):
    sol = solve(two_customer_tsptw)
    assert validate_solution(two_customer_tsptw, sol.transitions) == Valid(15)


def test_visit_outside_u(two_customer_tsptw):
    result = validate_solution(two_customer_tsptw, ["visit 1", "visit 1", "return"])
    assert result == Violation(1, "precondition")


def test_empty_sequence_not_base(two_customer_tsptw):
    assert validate_solution(two_customer_tsptw, []) == Violation(0, "not a base state")


def test_unknown_transition(two_customer_tsptw):
    result = validate_solution(two_customer_tsptw, ["fly 1"])
    assert isinstance(result, Violation) and "unknown" in result.reason


def test_forced_transition_must_be_taken():
    from dypdl.benchmarks import bin_packing

    m = bin_packing.build(bin_packing.Instance((6, 5, 5, 3), 10), symmetry_breaking=False)
    forced = bin_packing.build(bin_packing.Instance((6, 5, 5, 3), 10))
    plan = solve(m).transitions
    # the unforced model may open with any item; the forced model insists on item 0 first
    result = validate_solution(forced, ["open 1"] + [t for t in plan if t != "open 1"])
    assert isinstance(result, Violation) and result.step == 0


def test_constraint_checked_on_target():
    inst = tsptw.Instance(((0, 5), (5, 0)), (0, 0), (100, 3))
    result = validate_solution(tsptw.build(inst), ["visit 1", "return"])
    assert result == Violation(0, "state constraint violated")


SMALL = {"tsptw": 5, "cvrp": 4, "salbp1": 6, "bin_packing": 6, "mosp": 5, "graph_clear": 5}


@pytest.mark.parametrize("name", list(SMALL))
def test_agrees_with_path_enumeration(name):
    for seed in range(5):
        m = build(name, generate(name, SMALL[name], seed))
        try:
            brute = enumerate_paths(m, max_paths=10**4)
        except BudgetExceeded:
            continue
        assert oracle_solve(m).value == brute


@pytest.mark.parametrize("name", list(SMALL))
def test_memo_transparency(name):
    for seed in range(3):
        m = build(name, generate(name, SMALL[name] - 1, seed))
        assert Oracle(m).solve().value == Oracle(m, memo=False).solve().value


def test_tsptw_brute_force_agreement():
    for seed in range(10):
        inst = tsptw.generate(6, seed, width=40)
        value = oracle_solve(tsptw.build(inst)).value
        expected = tsptw.brute_force(inst)
        assert value == (float("inf") if expected is None else expected)
