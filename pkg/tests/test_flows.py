from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from helpers import PRIMARY, net_of, primary_flow, random_instance
from rrflow.flows import (
    InvalidFlowError,
    PathFlow,
    ReroutingFlow,
    ViolatedCut,
    arc_flow_of,
    available_capacity,
    check_rerouting,
    find_rerouting,
    interrupted_values,
    parse_flow,
    path_decompose,
    validate_flow,
    verify_k_reroutable,
    verify_reroutable,
    write_flow,
)
from rrflow.graph import NetworkFormatError
from rrflow.instances import gen_fig2, make_fp, reduce_fp_k2
from rrflow.oracle import oracle_max_rf, oracle_max_srf_paths

HALF = Fraction(1, 2)


# -- arc flows and available capacity --------------------------------------


def test_arc_flow_examples(fig2_unit):
    assert set(arc_flow_of(fig2_unit, PathFlow()).values()) == {0}
    flow = arc_flow_of(fig2_unit, primary_flow(1))
    assert [flow[a] for a in PRIMARY] == [1, 1, 1]
    assert all(v == 0 for a, v in flow.items() if a.startswith("bk"))
    net = net_of(("a", "s", "v", 2), ("b", "v", "t", 2), ("c", "v", "t", 1))
    x = PathFlow.from_pairs([(("a", "b"), Fraction(1, 3)), (("a", "c"), HALF)])
    assert arc_flow_of(net, x)["a"] == Fraction(5, 6)


def test_available_capacity_examples(fig2_cap2):
    x = primary_flow(1)
    assert available_capacity(fig2_cap2, x, "a1", "a3", strict=False) == 1
    assert available_capacity(fig2_cap2, x, "a1", "a3", strict=True) == 0
    for a in fig2_cap2.arcs:
        if a.id != "a2":
            for strict in (False, True):
                assert available_capacity(fig2_cap2, PathFlow(), "a2", a.id, strict) == a.capacity
    with pytest.raises(ValueError):
        available_capacity(fig2_cap2, x, "a1", "a1", strict=False)


@given(st.integers(0, 5_000))
def test_plain_capacity_dominates_strict(seed):
    net = random_instance(seed)
    _, x = oracle_max_rf(net)
    for f in net.arcs:
        for a in net.arcs:
            if a.id != f.id:
                plain = available_capacity(net, x, f.id, a.id, strict=False)
                strict = available_capacity(net, x, f.id, a.id, strict=True)
                assert plain >= strict >= 0


# -- reroutings and verifiers ----------------------------------------------


def test_zero_demand_gives_empty_rerouting(fig2_unit):
    out = find_rerouting(fig2_unit, primary_flow(HALF), "a1", demand=0)
    assert out == ReroutingFlow("a1", ())


def test_rerouting_via_backup_link(fig2_unit):
    x = primary_flow(HALF)
    out = find_rerouting(fig2_unit, x, "a2", strict=True)
    assert out.value == HALF
    assert out.entries == ((("bk_b_t_1_a", "bk_b_t_1_b"), HALF),)
    assert check_rerouting(fig2_unit, x, out, strict=True)


def test_violated_cut_when_rerouting_is_blocked(fig2_unit):
    out = find_rerouting(fig2_unit, primary_flow(1), "a1", strict=True)
    assert isinstance(out, ViolatedCut)
    assert "a3" in out.arcs and out.slack == 0


def test_verify_examples(fig2_unit, fig2_cap2):
    x = primary_flow(1)
    assert verify_reroutable(fig2_cap2, x, strict=False).ok
    assert not verify_reroutable(fig2_cap2, x, strict=True).ok
    assert verify_reroutable(fig2_unit, primary_flow(HALF), strict=True).ok
    single = net_of(("e1", "s", "t", 1))
    assert not verify_reroutable(single, PathFlow.from_pairs([(("e1",), 1)])).ok


def test_verdict_lists_only_carrying_arcs(fig2_unit):
    verdict = verify_reroutable(fig2_unit, primary_flow(HALF), strict=True)
    assert set(verdict.per_arc) == set(PRIMARY)
    assert verdict.failures() == {}


def test_invalid_flows_rejected(fig2_unit):
    with pytest.raises(InvalidFlowError):
        validate_flow(fig2_unit, primary_flow(2))
    with pytest.raises(InvalidFlowError):
        validate_flow(fig2_unit, PathFlow.from_pairs([(("a1", "a3"), 1)]))
    with pytest.raises(InvalidFlowError):
        PathFlow.from_pairs([(PRIMARY, -1)])


def test_flow_file_round_trip():
    x = PathFlow.from_pairs([(PRIMARY, HALF), (("a1", "bk_b_t_1_a", "bk_b_t_1_b"), Fraction(1, 3))])
    text = write_flow(x)
    assert text.splitlines()[0] == "f 1/2 a1 a2 a3"
    assert parse_flow(text) == x
    with pytest.raises(NetworkFormatError):
        parse_flow("g 1 a1\n")


# -- properties over oracle flows ------------------------------------------


@given(st.integers(0, 5_000))
def test_strict_implies_plain(seed):
    net = random_instance(seed)
    _, x = oracle_max_srf_paths(net)
    assert verify_reroutable(net, x, strict=True).ok
    assert verify_reroutable(net, x, strict=False).ok


@given(st.integers(0, 5_000))
def test_halving_makes_reroutable_flows_strict(seed):
    net = random_instance(seed)
    _, x = oracle_max_rf(net)
    assert verify_reroutable(net, x, strict=False).ok
    assert verify_reroutable(net, x.scaled(HALF), strict=True).ok


@given(st.integers(0, 5_000))
def test_reroutings_pass_the_independent_check(seed):
    net = random_instance(seed)
    _, x = oracle_max_rf(net)
    for out in verify_reroutable(net, x).per_arc.values():
        assert check_rerouting(net, x, out, strict=False)


@given(st.integers(0, 5_000))
def test_backup_links_carry_no_reroutable_flow(seed):
    from rrflow.instances import add_backup_link

    base = random_instance(seed, max_nodes=6, max_arcs=9)
    tails = [v for v in base.nodes if v != "t"]
    net = add_backup_link(base, tails[seed % len(tails)], "t")
    backup = [a.id for a in net.arcs if a.id.startswith("bk")]
    _, x = oracle_max_rf(net)
    flow = arc_flow_of(net, x)
    assert all(flow[a] == 0 for a in backup)


@given(st.integers(0, 5_000), st.booleans())
def test_single_failure_specialisation(seed, strict):
    net = random_instance(seed, max_nodes=6, max_arcs=10)
    _, x = oracle_max_rf(net)
    x = x.scaled(Fraction(3, 4))
    assert verify_k_reroutable(net, x, 1, strict).ok == verify_reroutable(net, x, strict).ok


# -- multiple failures -----------------------------------------------------


def test_interrupted_values_examples():
    net = net_of(("e1", "s", "u", 1), ("e2", "u", "v", 1), ("e3", "v", "t", 1), ("b", "s", "v", 1))
    x = PathFlow.from_pairs([(("e1", "e2", "e3"), 1)])
    assert interrupted_values(net, PathFlow(), {"e1"}).total == 0
    assert interrupted_values(net, x, {"e2", "e3"}).interrupted == {"e2": 1, "e3": 0}
    y = PathFlow.from_pairs([(("e1", "e2", "e3"), HALF), (("b", "e3"), HALF)])
    assert interrupted_values(net, y, {"e2", "e3"}).interrupted == {"e2": HALF, "e3": HALF}


def one_pair_reduction():
    # pair-avoiding path d1 d2; the pair is {d2, d4}
    inst = make_fp([("d1", "s", "x"), ("d2", "x", "t"), ("d3", "s", "y"), ("d4", "y", "t")], [("d2", "d4")])
    return reduce_fp_k2(inst)


def two_segment_paths(first, second):
    upper = ("g_1", "h_1", "g'_1", "h'_1", "d1", "d2")
    lower = ("g_1bar", "h_1bar", "g'_1bar", "h'_1bar", "e1", "e2", "e3", "e4", "e5", "e6")
    return PathFlow.from_pairs([(upper, first), (lower, second)])


def test_two_failure_flow_from_the_reduction_is_reroutable():
    net = one_pair_reduction()
    x = two_segment_paths(HALF, HALF)
    validate_flow(net, x)
    assert verify_k_reroutable(net, x, 2, strict=True).ok
    assert verify_k_reroutable(net, x, 2, strict=False).ok


def test_overloaded_segment_fails_for_the_paired_failure():
    net = one_pair_reduction()
    x = two_segment_paths(Fraction(3, 4), Fraction(1, 4))
    verdict = verify_k_reroutable(net, x, 2)
    assert not verdict.ok
    assert isinstance(verdict.per_set[frozenset({"h'_1", "d2"})], ViolatedCut)


def test_k_budget_enforced(fig2_unit):
    from rrflow.flows import BudgetExceeded

    with pytest.raises(BudgetExceeded):
        verify_k_reroutable(fig2_unit, primary_flow(HALF), 2, max_failure_sets=10)


# -- path decomposition ----------------------------------------------------


def test_decompose_single_path(fig2_unit):
    flow = arc_flow_of(fig2_unit, primary_flow(HALF))
    assert path_decompose(fig2_unit, flow) == primary_flow(HALF)


def test_decompose_two_disjoint_paths():
    net = net_of(("a", "s", "u", 1), ("b", "u", "t", 1), ("c", "s", "v", 1), ("d", "v", "t", 1))
    x = path_decompose(net, {"a": 1, "b": 1, "c": 1, "d": 1})
    assert x.value == 2 and sorted(x.paths) == [("a", "b"), ("c", "d")]


def test_decompose_drops_cycles():
    net = net_of(("a", "s", "t", 1), ("p", "u", "v", 1), ("q", "v", "u", 1))
    x = path_decompose(net, {"a": 1, "p": 1, "q": 1})
    assert x == PathFlow.from_pairs([(("a",), 1)])


def test_decompose_rejects_bad_input():
    net = net_of(("a", "s", "u", 1), ("b", "u", "t", 1))
    with pytest.raises(ValueError):
        path_decompose(net, {"a": 1, "b": Fraction(1, 2)})
    with pytest.raises(ValueError):
        path_decompose(net, {"a": -1, "b": -1})


@given(st.integers(0, 5_000))
def test_decomposition_reproduces_acyclic_arc_flows(seed):
    from rrflow.maxflow import max_flow

    net = random_instance(seed)
    res = max_flow(net)
    x = path_decompose(net, res.arc_flow)
    assert x.value == res.value
    assert len(x) <= len(net.arcs)
    flow = arc_flow_of(net, x)
    assert all(flow[a] <= res.arc_flow[a] for a in flow)
