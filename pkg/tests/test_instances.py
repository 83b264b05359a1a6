from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rrflow.flows import PathFlow, arc_flow_of, verify_k_reroutable, verify_reroutable
from rrflow.graph import NetworkFormatError, enumerate_simple_paths, parse_network, write_network
from rrflow.instances import (
    add_backup_link,
    gen_crossing,
    gen_fig2,
    gen_fig3,
    gen_random,
    is_normal,
    make_fp,
    normalize_fp,
    parse_fp,
    random_fp_instance,
    reduce_fp_cap12,
    reduce_fp_integral,
    reduce_fp_k2,
    solve_fp_bruteforce,
    write_fp,
)
from rrflow.oracle import oracle_integral_unit_flow, oracle_max_k_rf, oracle_max_rf
from rrflow.unitcap import unit_demand_half_integral

from helpers import net_of

CROSS = [("d1", "s", "x"), ("d2", "x", "t"), ("d3", "s", "y"), ("d4", "y", "t")]


def test_backup_link_shape():
    net = net_of(("e1", "s", "u", 2), ("e2", "u", "t", 1))
    out = add_backup_link(net, "s", "t", bidirected=True)
    assert len(out.arcs) == len(net.arcs) + 4
    assert len(out.nodes) == len(net.nodes) + 2
    new = [a for a in out.arcs if a.id not in net.arc]
    assert all(a.capacity == 2 for a in new)
    one = add_backup_link(net, "u", "t")
    assert len(one.arcs) == 4 and len(one.nodes) == 4
    with pytest.raises(ValueError):
        add_backup_link(net, "s", "nowhere")


def test_fig2_shape():
    for cap in (1, 2):
        net = gen_fig2(cap)
        assert len(net.nodes) == 7 and len(net.arcs) == 9
        assert net.capacity["a1"] == cap
        assert len(list(enumerate_simple_paths(net, "s", "t"))) == 3
    with pytest.raises(ValueError):
        gen_fig2(3)


def test_fig3_shape():
    net = gen_fig3(3)
    assert len(net.nodes) == 39 and len(net.arcs) == 61
    assert all(a.capacity == 1 for a in net.arcs)
    with pytest.raises(ValueError):
        gen_fig3(2)


def test_gen_random_deterministic_and_sinkless():
    a = gen_random(6, 10, (1, 2), seed=5)
    assert write_network(a) == write_network(gen_random(6, 10, (1, 2), seed=5))
    assert len(a.arcs) == 10 and not a.out_arcs["t"]
    assert {c.capacity for c in a.arcs} <= {1, 2}
    assert parse_network(write_network(a)) == a


@given(st.integers(2, 5), st.integers(0, 10_000))
def test_gen_crossing_properties(k, seed):
    net = gen_crossing(k, seed)
    assert write_network(net) == write_network(gen_crossing(k, seed))
    assert all(a.capacity == 1 for a in net.arcs)
    for i in range(1, k + 1):
        assert f"s_v{i}" in net.arc and f"w{i}_t" in net.arc
    assert not net.out_arcs["t"]


def test_fp_roundtrip_and_parse_errors():
    inst = make_fp(CROSS, [("d1", "d4")])
    assert parse_fp(write_fp(inst)) == inst
    with pytest.raises(NetworkFormatError):
        parse_fp(write_network(inst.graph) + "pair d1\n")
    with pytest.raises(NetworkFormatError):
        parse_fp(write_network(inst.graph) + "pair d1 zz\n")
    with pytest.raises(ValueError):
        make_fp(CROSS, [("d1", "zz")])


def test_bruteforce_examples():
    assert solve_fp_bruteforce(make_fp(CROSS, [])) == ("d1", "d2")
    chain = make_fp([("d1", "s", "x"), ("d2", "x", "t")], [("d1", "d2")])
    assert solve_fp_bruteforce(chain) is None
    assert solve_fp_bruteforce(make_fp(CROSS, [("d1", "d2")])) == ("d3", "d4")
    assert solve_fp_bruteforce(make_fp(CROSS, [("d1", "d2"), ("d3", "d4")])) is None


def test_normalize_examples():
    shared = make_fp(CROSS, [("d1", "d4"), ("d1", "d3")])
    norm = normalize_fp(shared)
    assert is_normal(norm) and not is_normal(shared)
    arcs = [a for p in norm.pairs for a in p]
    assert len(arcs) == len(set(arcs))
    for a in arcs:
        assert len(norm.graph.out_arcs[norm.graph.tail(a)]) == 1
    assert normalize_fp(norm) == norm


@given(st.integers(0, 10_000))
def test_normalize_preserves_feasibility(seed):
    import random

    rng = random.Random(seed)
    names = ["s", "u1", "u2", "t"]
    cand = [(x, y) for x in names for y in names if x != y and x != "t" and y != "s"]
    chosen = rng.sample(cand, rng.randint(3, len(cand)))
    arcs = [(f"d{i}", x, y) for i, (x, y) in enumerate(chosen, start=1)]
    ids = [a[0] for a in arcs]
    pairs = [tuple(rng.sample(ids, 2)) for _ in range(rng.randint(0, 3))]
    raw = make_fp(arcs, pairs, nodes=names)
    norm = normalize_fp(raw)
    assert is_normal(norm)
    assert (solve_fp_bruteforce(raw) is None) == (solve_fp_bruteforce(norm) is None)


def test_reductions_reject_unnormalized():
    raw = make_fp(CROSS, [("d1", "d4")])
    for reduce in (reduce_fp_cap12, reduce_fp_integral, reduce_fp_k2):
        with pytest.raises(ValueError, match="normalize"):
            reduce(raw)


@pytest.mark.parametrize("seed", range(25))
def test_cap12_and_integral_reductions(seed):
    inst = random_fp_instance(seed)
    feasible = solve_fp_bruteforce(inst) is not None
    net = reduce_fp_cap12(inst)
    assert {a.capacity for a in net.arcs} <= {1, 2}
    assert (oracle_max_rf(net)[0] == 2) == feasible
    unit = reduce_fp_integral(inst)
    path = oracle_integral_unit_flow(unit)
    assert (path is not None) == feasible
    if path is not None:
        assert verify_reroutable(unit, PathFlow.from_pairs([(path, 1)])).ok


def test_half_integral_succeeds_where_integral_fails():
    inst = normalize_fp(make_fp(CROSS, [("d1", "d2"), ("d3", "d4")]))
    net = reduce_fp_integral(inst)
    assert solve_fp_bruteforce(inst) is None
    assert oracle_integral_unit_flow(net) is None
    out = unit_demand_half_integral(net)
    assert out.feasible
    assert verify_reroutable(net, out.flow).ok


def test_k2_reduction_feasible_flow_splits_gadget():
    inst = normalize_fp(make_fp(CROSS, [("d2", "d4")]))
    net = reduce_fp_k2(inst)
    val, x = oracle_max_k_rf(net, 2)
    assert val == 1
    load = arc_flow_of(net, x)
    assert load["h_1"] == load["h_1bar"] == Fraction(1, 2)
    assert verify_k_reroutable(net, x, 2).ok


def test_k2_reduction_infeasible():
    inst = normalize_fp(make_fp([("d1", "s", "x"), ("d2", "x", "t")], [("d1", "d2")]))
    net = reduce_fp_k2(inst)
    assert oracle_max_k_rf(net, 2)[0] < 1
