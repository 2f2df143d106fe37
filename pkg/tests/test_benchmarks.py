from pathlib import Path

import pytest

from dypdl import oracle_solve, solve
from dypdl.benchmarks import (
    CLASSES,
    InstanceFormatError,
    InvalidInstance,
    bin_packing,
    cvrp,
    graph_clear,
    mosp,
    salbp,
    tsptw,
)
from dypdl.model import validate_model
from dypdl.solver import MAX, PLUS, classify_cost_form

FIXTURES = Path(__file__).parent / "fixtures"
C3 = ((0, 5, 6), (5, 0, 4), (6, 4, 0))


def fixture(name):
    return (FIXTURES / name).read_text()


def optimum(model):
    return oracle_solve(model).value


# -- TSPTW -------------------------------------------------------------------------


def test_tsptw_depot_only():
    m = tsptw.build(tsptw.Instance(((0,),), (0,), (0,)))
    assert m.is_base(m.target) and solve(m).cost == 0


def test_tsptw_unreachable_deadline():
    assert solve(tsptw.build(tsptw.Instance(C3, (0, 0, 0), (100, 4, 100)))).status == "Infeasible"


def test_tsptw_uses_shortest_paths_without_triangle_inequality():
    c = ((0, 10, 1), (10, 0, 1), (1, 1, 0))
    inst = tsptw.Instance(c, (0, 0, 0), (100, 100, 100))
    assert not inst.triangle_inequality
    m = tsptw.build(inst)
    assert m.scope.table_data["cstar"].data[0][1] == 2
    assert "cstar" not in tsptw.build(tsptw.Instance(C3, (0,) * 3, (9,) * 3)).scope.tables


def test_tsptw_fixture():
    inst = tsptw.read(fixture("tsptw_3.txt"))
    assert inst.n == 3 and inst.c[0] == (0, 4, 9, 7) and inst.b[3] == 60
    assert solve(tsptw.build(inst)).cost == 16 == tsptw.brute_force(inst)


# -- CVRP --------------------------------------------------------------------------


def test_cvrp_single_vehicle_is_tsp():
    tsp = solve(tsptw.build(tsptw.Instance(C3, (0, 0, 0), (10**6,) * 3))).cost
    assert solve(cvrp.build(cvrp.Instance(C3, (0, 2, 3), 5, 1))).cost == tsp == 15


def test_cvrp_demand_over_capacity():
    assert solve(cvrp.build(cvrp.Instance(C3, (0, 2, 9), 5, 3))).status == "Infeasible"


def test_cvrp_two_trips():
    sol = solve(cvrp.build(cvrp.Instance(C3, (0, 4, 4), 4, 2)))
    assert sol.cost == 22 == 2 * 5 + 2 * 6


def test_cvrp_fixture():
    inst = cvrp.read(fixture("cvrp_4.txt"))
    assert (inst.n, inst.m, inst.q, inst.d) == (4, 2, 10, (0, 4, 6, 3, 5))
    assert solve(cvrp.build(inst)).cost == 22 == optimum(cvrp.build(inst))


def test_cvrp_rejects_asymmetric():
    with pytest.raises(InvalidInstance):
        cvrp.build(cvrp.Instance(((0, 1), (2, 0)), (0, 1), 3, 1))


# -- SALBP-1 and bin packing ---------------------------------------------------------


def test_salbp_examples():
    none = (frozenset(),) * 4
    assert solve(salbp.build(salbp.Instance((6, 5, 5, 3), 10, none))).cost == 2
    chain = (frozenset(), frozenset({0}), frozenset({1}))
    assert solve(salbp.build(salbp.Instance((4, 4, 4), 4, chain))).cost == 3
    assert solve(salbp.build(salbp.Instance((11,), 10, (frozenset(),)))).status == "Infeasible"


def test_salbp_cycle_rejected():
    with pytest.raises(InvalidInstance):
        salbp.build(salbp.Instance((1, 1), 5, (frozenset({1}), frozenset({0}))))


def test_salbp_fixture():
    inst = salbp.read(fixture("salbp_5.txt"))
    assert inst.pred == (frozenset(), frozenset({0}), frozenset({0}), frozenset({1}), frozenset({2}))
    assert solve(salbp.build(inst)).cost == 3 == optimum(salbp.build(inst))


def test_weights_thresholds():
    w2, w2p, w3 = salbp.weights([7, 6, 5, 4, 3, 9, 8], 12)
    assert w2 == [1, 0, 0, 0, 0, 1, 1]
    assert [str(x) for x in w2p] == ["0", "1/2", "0", "0", "0", "0", "0"]
    assert [str(x) for x in w3] == ["1/2", "1/2", "1/2", "1/3", "0", "1", "2/3"]


def test_bin_packing_examples():
    m = bin_packing.build(bin_packing.Instance((6, 5, 5, 3), 10))
    assert solve(m).cost == 2 and m.dual_bound(m.target) == 2
    assert solve(bin_packing.build(bin_packing.Instance((4,) * 5, 4))).cost == 5


def test_bin_packing_fixture():
    inst = bin_packing.read(fixture("bin_packing_6.txt"))
    assert inst.t == (6, 5, 5, 3, 4, 2) and inst.c == 10
    assert solve(bin_packing.build(inst)).cost == 3


def test_salbp_equals_bin_packing_without_precedence():
    for seed in range(30):
        bp = bin_packing.generate(7, seed)
        sa = salbp.Instance(bp.t, bp.c, (frozenset(),) * bp.n)
        assert optimum(salbp.build(sa)) == optimum(bin_packing.build(bp))


def test_symmetry_breaking_preserves_optimum():
    for seed in range(30):
        inst = bin_packing.generate(6, seed)
        plain = bin_packing.build(inst, symmetry_breaking=False)
        assert not any(t.forced for t in plain.transitions)
        assert optimum(plain) == optimum(bin_packing.build(inst))


# -- MOSP and graph-clear ------------------------------------------------------------


def test_mosp_examples():
    assert solve(mosp.build(mosp.Instance((frozenset({0}),), 1))).cost == 1
    assert mosp.Instance((frozenset({0}), frozenset({1}), frozenset({0})), 2).neighbors()[0] == [0, 2]


def test_mosp_fixture():
    inst = mosp.read(fixture("mosp_4.txt"))
    assert inst.orders == (frozenset({0, 1}), frozenset({1}), frozenset({1, 2}), frozenset({0}))
    assert solve(mosp.build(inst)).cost == 3 == optimum(mosp.build(inst))


def test_graph_clear_examples():
    assert solve(graph_clear.build(graph_clear.Instance((3,), ()))).cost == 3
    tri = graph_clear.Instance((1, 1, 1), ((0, 1, 1), (0, 2, 1), (1, 2, 1)))
    assert solve(graph_clear.build(tri)).cost == 4


def test_graph_clear_fixture():
    inst = graph_clear.read(fixture("graph_clear_4.txt"))
    assert inst.matrix()[3][0] == 1 and inst.a == (2, 1, 3, 1)
    assert solve(graph_clear.build(inst)).cost == 6 == optimum(graph_clear.build(inst))


def test_planar_grid():
    g = graph_clear.generate_grid(3, 3, seed=2)
    assert g.n == 9
    assert {(i, j) for i, j, _ in g.edges} == {
        (0, 1), (1, 2), (3, 4), (4, 5), (6, 7), (7, 8), (0, 3), (3, 6), (1, 4), (4, 7), (2, 5), (5, 8)}


# -- shared properties ---------------------------------------------------------------


@pytest.mark.parametrize("name", list(CLASSES))
def test_generator_deterministic(name):
    mod = CLASSES[name]
    assert mod.generate(8, 7) == mod.generate(8, 7)
    assert mod.generate(8, 7) != mod.generate(8, 8)


def test_salbp_generator_is_acyclic():
    inst = salbp.generate(10, seed=1, density=0.3)
    assert all(i < j for i, j in inst.edges())
    inst.check()


@pytest.mark.parametrize("name", list(CLASSES))
def test_text_round_trip(name):
    mod = CLASSES[name]
    for seed in range(5):
        inst = mod.generate(6, seed)
        assert mod.read(mod.write(inst)) == inst


@pytest.mark.parametrize("name", list(CLASSES))
def test_truncated_file(name):
    mod = CLASSES[name]
    text = mod.write(mod.generate(5, 0))
    lines = text.splitlines()
    with pytest.raises(InstanceFormatError) as info:
        mod.read("\n".join(lines[: len(lines) // 2]))
    assert info.value.line >= 1


def test_bad_token_reports_line():
    with pytest.raises(InstanceFormatError) as info:
        bin_packing.read("2 10\n3 x\n")
    assert info.value.line == 2


@pytest.mark.parametrize("name", list(CLASSES))
def test_models_validate_and_classify(name):
    mod = CLASSES[name]
    m = mod.build(mod.generate(5, 3))
    assert validate_model(m) == []
    expected = MAX if name in ("mosp", "graph_clear") else PLUS
    assert classify_cost_form(m) is expected


@pytest.mark.parametrize("name", list(CLASSES))
def test_bounds_admissible(name):
    """h(S) <= V*(S) on every memoized state of 50 small instances."""
    mod = CLASSES[name]
    from dypdl.oracle import Oracle

    checked = 0
    for seed in range(50):
        m = mod.build(mod.generate(5, seed))
        o = Oracle(m)
        o.solve()
        for state, (value, _) in o.memo.items():
            assert m.dual_bound(state) <= value
            checked += 1
    assert checked > 0
