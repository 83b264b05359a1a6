from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from helpers import net_of, random_instance
from rrflow.graph import (
    NetworkFormatError,
    PathLimitExceeded,
    check_path,
    enumerate_simple_paths,
    format_rational,
    is_cut,
    parse_network,
    parse_rational,
    reachable,
    st_bridges,
    write_network,
)
from rrflow.instances import gen_crossing, gen_fig2, gen_fig3

MINIMAL = "p rrf 2 1\nn s source\nn t sink\na e1 s t 1\n"


def test_parse_minimal_instance():
    net = parse_network(MINIMAL)
    assert net.nodes == ("s", "t")
    assert [(a.id, a.tail, a.head, a.capacity) for a in net.arcs] == [("e1", "s", "t", 1)]
    assert write_network(net) == MINIMAL


def test_parse_fractional_capacity_exactly():
    net = parse_network("n s source\nn t sink\na e1 s t 3/2\n")
    assert net.capacity["e1"] == Fraction(3, 2)


def test_parse_accepts_bytes_and_comments():
    net = parse_network(b"# comment\nn s source # tail comment\nn t sink\na e1 s t 2\n")
    assert net.capacity["e1"] == 2


@pytest.mark.parametrize(
    "text, line",
    [
        ("n s source\nn t sink\na e1 s t 1\na e1 s t 1\n", 4),
        ("n s source\nn t sink\na e1 s x 1\n", 3),
        ("n s source\nn t sink\na e1 s t -1\n", 3),
        ("n s source\nn t sink\na e1 s t one\n", 3),
        ("n s source\nn t sink\nq\n", 3),
        ("p rrf 3 1\nn s source\nn t sink\na e1 s t 1\n", 1),
    ],
)
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(NetworkFormatError) as exc:
        parse_network(text)
    assert exc.value.line == line


@pytest.mark.parametrize("text", ["n t sink\n", "n s source\n", "n s source\nn t source\n"])
def test_parse_rejects_missing_or_doubled_roles(text):
    with pytest.raises(NetworkFormatError):
        parse_network(text)


def test_integer_capacities_written_without_denominator():
    net = net_of(("e1", "s", "t", 2), ("e2", "s", "t", Fraction(1, 3)))
    text = write_network(net)
    assert "a e1 s t 2\n" in text and "a e2 s t 1/3\n" in text


@pytest.mark.parametrize("net", [gen_fig2(1), gen_fig2(2), gen_fig3(3), gen_crossing(3, 4), random_instance(7)])
def test_round_trip_generated_instances(net):
    text = write_network(net)
    again = parse_network(text)
    assert again == net
    assert write_network(again) == text


@given(st.fractions(min_value=0, max_value=50), st.fractions(min_value=0, max_value=50))
def test_rational_tokens_round_trip_and_add_exactly(p, q):
    assert parse_rational(format_rational(p)) == p
    cross = Fraction(p.numerator * q.denominator + q.numerator * p.denominator, p.denominator * q.denominator)
    assert p + q == cross


def test_paths_of_parallel_arcs():
    net = net_of(("e1", "s", "t", 1), ("e2", "s", "t", 1))
    assert enumerate_simple_paths(net, "s", "t") == [("e1",), ("e2",)]


def test_fig2_simple_paths():
    # the primary path plus the detours s->bk->c->t and s->b->bk->t
    paths = enumerate_simple_paths(gen_fig2(1), "s", "t")
    assert paths == [
        ("a1", "a2", "a3"),
        ("a1", "bk_b_t_1_a", "bk_b_t_1_b"),
        ("bk_s_c_1_a", "bk_s_c_1_b", "a3"),
    ]


def test_paths_when_disconnected():
    net = net_of(("e1", "t", "s", 1))
    assert enumerate_simple_paths(net, "s", "t") == []


def test_path_limit():
    net = gen_fig3(3)
    with pytest.raises(PathLimitExceeded):
        enumerate_simple_paths(net, "s", "t", limit=5)


@given(st.integers(0, 10_000))
def test_enumerated_paths_are_distinct_and_simple(seed):
    net = random_instance(seed)
    paths = enumerate_simple_paths(net, "s", "t")
    assert len(set(paths)) == len(paths)
    for p in paths:
        check_path(net, p, "s", "t")
    assert paths == sorted(paths)


def test_bridges_examples():
    assert st_bridges(net_of(("e1", "s", "t", 1))) == {"e1"}
    assert st_bridges(net_of(("e1", "s", "t", 1), ("e2", "s", "t", 1))) == set()
    net = net_of(("e1", "s", "v", 1), ("e2", "v", "t", 1), ("e3", "s", "v", 1))
    assert st_bridges(net) == {"e2"}
    assert st_bridges(net_of(("e1", "t", "s", 1))) == set()


def test_cut_examples(fig2_unit):
    net = fig2_unit
    assert is_cut(net, {a.id for a in net.out_arcs["s"]}, "s", "t")
    assert not is_cut(net, set(), "s", "t")
    assert is_cut(net, {"a1", "a3"}, "s", "t")
    paths = enumerate_simple_paths(net, "s", "t")
    assert all({"a1", "a3"} & set(p) for p in paths)


@given(st.integers(0, 10_000))
def test_bridge_iff_single_arc_cut(seed):
    net = random_instance(seed)
    bridges = st_bridges(net)
    if "t" not in reachable(net, "s"):
        assert bridges == set()
        return
    for a in net.arcs:
        assert (a.id in bridges) == is_cut(net, {a.id}, "s", "t")


@given(st.integers(0, 10_000))
def test_is_cut_matches_path_hitting(seed):
    net = random_instance(seed, max_nodes=6, max_arcs=9)
    paths = enumerate_simple_paths(net, "s", "t")
    ids = [a.id for a in net.arcs]
    for size in (1, 2):
        for arcs in combinations(ids, size):
            assert is_cut(net, arcs, "s", "t") == all(set(arcs) & set(p) for p in paths)


def test_reachable_respects_removed(fig2_unit):
    assert "t" in reachable(fig2_unit, "s")
    assert "t" not in reachable(fig2_unit, "s", {"a1", "a3"})
