"""Instance generators: backup links, the worked examples, random networks,
and the forbidden-pairs reductions with a brute-force reference solver."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .graph import (
    DEFAULT_PATH_LIMIT,
    Arc,
    ArcPath,
    Network,
    NetworkFormatError,
    enumerate_simple_paths,
    parse_network,
    write_network,
)

# -- backup links ----------------------------------------------------------


class _Builder:
    """Mutable arc list with fresh-name helpers; frozen into a Network."""

    def __init__(self, nodes: Iterable[str] = (), arcs: Iterable[Arc] = ()):
        self.nodes: list[str] = list(nodes)
        self.node_set = set(self.nodes)
        self.arcs: list[Arc] = list(arcs)
        self.arc_ids = {a.id for a in self.arcs}

    def node(self, v: str) -> str:
        if v not in self.node_set:
            self.node_set.add(v)
            self.nodes.append(v)
        return v

    def new_node(self, v: str) -> str:
        if v in self.node_set:
            raise ValueError(f"node name {v!r} already in use")
        return self.node(v)

    def arc(self, aid: str, tail: str, head: str, cap) -> str:
        if aid in self.arc_ids:
            raise ValueError(f"arc id {aid!r} already in use")
        self.node(tail)
        self.node(head)
        self.arc_ids.add(aid)
        self.arcs.append(Arc(aid, tail, head, Fraction(cap)))
        return aid

    def max_capacity(self) -> Fraction:
        return max((a.capacity for a in self.arcs), default=Fraction(1))

    def backup(self, v: str, w: str, cap=None, tag: str = "bk") -> tuple[str, str]:
        cap = self.max_capacity() if cap is None else Fraction(cap)
        i = 1
        while f"{tag}_{v}_{w}_{i}" in self.node_set:
            i += 1
        mid = self.new_node(f"{tag}_{v}_{w}_{i}")
        first = self.arc(f"{mid}_a", v, mid, cap)
        second = self.arc(f"{mid}_b", mid, w, cap)
        return first, second

    def network(self, source: str, sink: str) -> Network:
        return Network(tuple(self.nodes), tuple(self.arcs), source, sink)


def add_backup_link(net: Network, v: str, w: str, bidirected: bool = False) -> Network:
    """Add a length-2 v-w path through a private node, at maximum capacity."""
    for x in (v, w):
        if x not in net.out_arcs:
            raise ValueError(f"unknown node {x!r}")
    b = _Builder(net.nodes, net.arcs)
    cap = net.max_capacity
    b.backup(v, w, cap)
    if bidirected:
        b.backup(w, v, cap)
    return b.network(net.source, net.sink)


# -- worked examples -------------------------------------------------------


def gen_fig2(a1_capacity=1) -> Network:
    """Primary path a1 a2 a3 from s to t with three backup links.

    Nodes: s -a1-> b -a2-> c -a3-> t; bidirected backup link between s and c,
    backup link from b to t.
    """
    a1_capacity = Fraction(a1_capacity)
    if a1_capacity not in (1, 2):
        raise ValueError("a1_capacity must be 1 or 2")
    b = _Builder(["s", "b", "c", "t"])
    b.arc("a1", "s", "b", a1_capacity)
    b.arc("a2", "b", "c", 1)
    b.arc("a3", "c", "t", 1)
    b.backup("s", "c")
    b.backup("c", "s")
    b.backup("b", "t")
    return b.network("s", "t")


def gen_fig3(k: int = 3) -> Network:
    """k s-v paths, the arc (s,v), k v-t paths; unit capacities.

    Path nodes are ``p<i>_<j>`` (s-v path i) and ``q<j>_<i>`` (v-t path j),
    each path having k intermediate nodes. Node i of v-t path j and node j of
    s-v path i are joined by a bidirected backup link.
    """
    if k < 3:
        raise ValueError("k must be at least 3")
    b = _Builder(["s", "v", "t"])
    b.arc("s-v", "s", "v", 1)
    for i in range(1, k + 1):
        chain = ["s"] + [f"p{i}_{j}" for j in range(1, k + 1)] + ["v"]
        for x, y in zip(chain, chain[1:]):
            b.arc(f"{x}-{y}", x, y, 1)
    for j in range(1, k + 1):
        chain = ["v"] + [f"q{j}_{i}" for i in range(1, k + 1)] + ["t"]
        for x, y in zip(chain, chain[1:]):
            b.arc(f"{x}-{y}", x, y, 1)
    for j in range(1, k + 1):
        for i in range(1, k + 1):
            b.backup(f"q{j}_{i}", f"p{i}_{j}")
            b.backup(f"p{i}_{j}", f"q{j}_{i}")
    return b.network("s", "t")


def gen_random(nodes: int, arcs: int, cap_choices: Sequence = (1,), seed: int = 0) -> Network:
    """Seeded random digraph on s, n1, ..., t without arcs leaving t."""
    if nodes < 2:
        raise ValueError("need at least two nodes")
    rng = random.Random(seed)
    names = ["s"] + [f"n{i}" for i in range(1, nodes - 1)] + ["t"]
    pairs = [(u, v) for u in names for v in names if u != v and u != "t"]
    chosen = rng.sample(pairs, min(arcs, len(pairs)))
    caps = [Fraction(c) for c in cap_choices]
    b = _Builder(names)
    for i, (u, v) in enumerate(chosen, start=1):
        b.arc(f"e{i}", u, v, rng.choice(caps))
    return b.network("s", "t")


def gen_crossing(k: int, seed: int = 0) -> Network:
    """Unit-capacity cycle of k crossing paths with seeded perturbations.

    Path i runs s, v_i, w_i, v_{i+1}, w_{i+1}, t (indices mod k), so every
    path crosses the cut around {s, v_1, ..., v_k} twice. Backup links join
    consecutive v nodes; a few random arcs or backup links are added.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    rng = random.Random(seed)
    b = _Builder(["s"] + [f"{c}{i}" for i in range(1, k + 1) for c in "vw"] + ["t"])
    for i in range(1, k + 1):
        j = i % k + 1
        b.arc(f"s_v{i}", "s", f"v{i}", 1)
        b.arc(f"v{i}_w{i}", f"v{i}", f"w{i}", 1)
        b.arc(f"w{i}_v{j}", f"w{i}", f"v{j}", 1)
        b.arc(f"w{i}_t", f"w{i}", "t", 1)
    for i in range(1, k + 1):
        j = i % k + 1
        b.backup(f"v{i}", f"v{j}")
        if k == 2 or rng.random() < 0.5:
            b.backup(f"v{j}", f"v{i}")
    core = [v for v in b.nodes if not v.startswith("bk")]
    for e in range(rng.randint(0, 2)):
        u = rng.choice([v for v in core if v != "t"])
        w = rng.choice([v for v in core if v not in ("s", u)])
        if rng.random() < 0.5:
            b.arc(f"x{e}", u, w, 1)
        else:
            b.backup(u, w)
    return b.network("s", "t")


# -- forbidden pairs -------------------------------------------------------


@dataclass(frozen=True)
class ForbiddenPairsInstance:
    graph: Network
    pairs: tuple[tuple[str, str], ...]

    @property
    def source(self) -> str:
        return self.graph.source

    @property
    def sink(self) -> str:
        return self.graph.sink

    def pair_arcs(self) -> set[str]:
        return {a for p in self.pairs for a in p}


def make_fp(arcs: Iterable[tuple[str, str, str]], pairs: Iterable[tuple[str, str]],
            source: str = "s", sink: str = "t", nodes=None) -> ForbiddenPairsInstance:
    net = Network.build(((aid, u, v, 1) for aid, u, v in arcs), source, sink, nodes)
    inst = ForbiddenPairsInstance(net, tuple(tuple(p) for p in pairs))
    for p in inst.pairs:
        if len(p) != 2 or any(a not in net.arc for a in p):
            raise ValueError(f"bad pair {p}")
    return inst


def parse_fp(text: str | bytes) -> ForbiddenPairsInstance:
    """Instance file plus ``pair <arc> <arc>`` lines."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    rest, pairs = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tok = raw.split("#", 1)[0].split()
        if tok and tok[0] == "pair":
            if len(tok) != 3:
                raise NetworkFormatError("expected 'pair <arc> <arc>'", lineno)
            pairs.append((tok[1], tok[2]))
            rest.append("")
        else:
            rest.append(raw)
    net = parse_network("\n".join(rest))
    for p in pairs:
        for a in p:
            if a not in net.arc:
                raise NetworkFormatError(f"pair names unknown arc {a!r}")
    return ForbiddenPairsInstance(net, tuple(pairs))


def write_fp(inst: ForbiddenPairsInstance) -> str:
    return write_network(inst.graph) + "".join(f"pair {a} {b}\n" for a, b in inst.pairs)


def is_normal(inst: ForbiddenPairsInstance) -> bool:
    return not _normal_violations(inst)


def _normal_violations(inst: ForbiddenPairsInstance) -> list[tuple[str, str]]:
    net = inst.graph
    count: dict[str, int] = {}
    for p in inst.pairs:
        if p[0] == p[1]:
            return [("degenerate", p[0])]
        for a in p:
            count[a] = count.get(a, 0) + 1
    shared = [("shared", a) for a, c in count.items() if c > 1]
    if shared:
        return shared
    pair_heads = {net.head(a) for a in count}
    out = []
    for a in sorted(count):
        v = net.tail(a)
        if len(net.out_arcs[v]) > 1 or v in pair_heads or v in (net.source, net.sink):
            out.append(("tail", a))
    return out


def normalize_fp(inst: ForbiddenPairsInstance) -> ForbiddenPairsInstance:
    """Subdivide arcs until pairs are disjoint, each pair arc is the only arc
    leaving its tail, no pair arc ends where another starts, and no pair arc
    starts at s' or t'. Pair-avoiding path existence is preserved."""
    pairs = [tuple(p) for p in inst.pairs if p[0] != p[1]]
    net = inst.graph
    while True:
        cur = ForbiddenPairsInstance(net, tuple(pairs))
        bad = _normal_violations(cur)
        if not bad:
            return cur
        kind, aid = bad[0]
        a = net.arc[aid]
        b = _Builder(net.nodes)
        if kind == "shared":
            users = [i for i, p in enumerate(pairs) if aid in p]
            chain = [a.tail] + [b.new_node(_fresh(net, f"{aid}_m{j}")) for j in range(1, len(users))] + [a.head]
            copies = [f"{aid}_{j}" for j in range(1, len(users) + 1)]
            for arc in net.arcs:
                if arc.id == aid:
                    for cid, (x, y) in zip(copies, zip(chain, chain[1:])):
                        b.arc(cid, x, y, a.capacity)
                else:
                    b.arcs.append(arc)
                    b.arc_ids.add(arc.id)
            for cid, i in zip(copies, users):
                pairs[i] = tuple(cid if x == aid else x for x in pairs[i])
        else:
            mid = b.new_node(_fresh(net, f"{aid}_m"))
            for arc in net.arcs:
                if arc.id == aid:
                    b.arc(_fresh_arc(net, f"{aid}_pre"), a.tail, mid, a.capacity)
                    b.arc(aid, mid, a.head, a.capacity)
                else:
                    b.arcs.append(arc)
                    b.arc_ids.add(arc.id)
        net = b.network(net.source, net.sink)


def _fresh(net: Network, base: str) -> str:
    name = base
    while name in net.out_arcs:
        name += "'"
    return name


def _fresh_arc(net: Network, base: str) -> str:
    name = base
    while name in net.arc:
        name += "'"
    return name


def solve_fp_bruteforce(inst: ForbiddenPairsInstance, limit: int = DEFAULT_PATH_LIMIT) -> ArcPath | None:
    """First simple s'-t' path containing at most one arc of every pair."""
    net = inst.graph
    for path in enumerate_simple_paths(net, net.source, net.sink, limit=limit):
        used = set(path)
        if all(not (a in used and b in used) for a, b in inst.pairs):
            return path
    return None


def _require_normal(inst: ForbiddenPairsInstance) -> None:
    bad = _normal_violations(inst)
    if bad:
        raise ValueError(f"instance is not normalized ({bad[0][0]} arc {bad[0][1]}); run normalize_fp first")


def _copy_graph(inst: ForbiddenPairsInstance, cap=1) -> _Builder:
    b = _Builder(inst.graph.nodes)
    for a in inst.graph.arcs:
        b.arc(a.id, a.tail, a.head, cap)
    return b


def reduce_fp_cap12(inst: ForbiddenPairsInstance) -> Network:
    """Capacities in {1, 2}: a reroutable flow of value 2 exists iff the
    forbidden-pairs instance is feasible."""
    _require_normal(inst)
    k = len(inst.pairs)
    s, tp = inst.source, inst.sink
    b = _copy_graph(inst, 1)
    for a, abar in inst.pairs:
        b.arcs = [Arc(x.id, x.tail, x.head, Fraction(2)) if x.id in (a, abar) else x for x in b.arcs]
    v = {1: tp}
    for i in range(2, k + 2):
        v[i] = b.new_node(f"v_{i}")
    t = v[k + 1]
    for i, (a, abar) in enumerate(inst.pairs, start=1):
        w = b.new_node(f"w_{i}")
        wb = b.new_node(f"w_{i}bar")
        b.arc(f"g_{i}", v[i], w, 1)
        b.arc(f"h_{i}", w, v[i + 1], 1)
        b.arc(f"g_{i}bar", v[i], wb, 1)
        b.arc(f"h_{i}bar", wb, v[i + 1], 1)
    b.arc("s_tp", s, tp, 1)
    pair_tails = {inst.graph.tail(a) for p in inst.pairs for a in p}
    safe = [v[i] for i in range(1, k + 1)]
    safe += [x for x in inst.graph.nodes if x not in pair_tails and x not in safe]
    for x in safe:
        if x != t:
            b.backup(x, t)
    for i, (a, abar) in enumerate(inst.pairs, start=1):
        z, zb = inst.graph.tail(a), inst.graph.tail(abar)
        b.backup(z, f"w_{i}")
        b.backup(f"w_{i}", z)
        b.backup(zb, f"w_{i}bar")
        b.backup(f"w_{i}bar", zb)
    return b.network(s, t)


def reduce_fp_integral(inst: ForbiddenPairsInstance) -> Network:
    """Unit capacities: an integral reroutable flow of value 1 exists iff the
    forbidden-pairs instance is feasible."""
    _require_normal(inst)
    s, t = inst.source, inst.sink
    b = _copy_graph(inst, 1)
    for a, abar in inst.pairs:
        z, zb = inst.graph.tail(a), inst.graph.tail(abar)
        b.backup(z, zb)
        b.backup(zb, z)
    pair_tails = {inst.graph.tail(a) for p in inst.pairs for a in p}
    for x in inst.graph.nodes:
        if x not in pair_tails and x != t:
            b.backup(x, t)
    return b.network(s, t)


def reduce_fp_k2(inst: ForbiddenPairsInstance) -> Network:
    """Unit capacities, two simultaneous failures: a 2-reroutable flow of
    value 1 exists iff the forbidden-pairs instance is feasible."""
    _require_normal(inst)
    ell = len(inst.pairs)
    sp, tp = inst.source, inst.sink
    b = _copy_graph(inst, 1)

    def backup2(x, y):
        b.backup(x, y, 1)
        b.backup(x, y, 1)

    v = {ell + 1: sp}
    for i in range(1, ell + 1):
        v[i] = b.new_node(f"v_{i}")
    for i, (a, abar) in enumerate(inst.pairs, start=1):
        w, vp, wp = b.new_node(f"w_{i}"), b.new_node(f"v'_{i}"), b.new_node(f"w'_{i}")
        wb, vpb, wpb = b.new_node(f"w_{i}bar"), b.new_node(f"v'_{i}bar"), b.new_node(f"w'_{i}bar")
        b.arc(f"g_{i}", v[i], w, 1)
        b.arc(f"h_{i}", w, vp, 1)
        b.arc(f"g'_{i}", vp, wp, 1)
        b.arc(f"h'_{i}", wp, v[i + 1], 1)
        b.arc(f"g_{i}bar", v[i], wb, 1)
        b.arc(f"h_{i}bar", wb, vpb, 1)
        b.arc(f"g'_{i}bar", vpb, wpb, 1)
        b.arc(f"h'_{i}bar", wpb, v[i + 1], 1)
    for i, (a, abar) in enumerate(inst.pairs, start=1):
        z, zb = inst.graph.tail(a), inst.graph.tail(abar)
        for x in (v[i], f"v'_{i}", f"v'_{i}bar"):
            backup2(x, tp)
        backup2(f"w_{i}", f"w'_{i}")
        backup2(f"w'_{i}", z)
        backup2(z, f"w_{i}")
        backup2(f"w_{i}bar", f"w'_{i}bar")
        backup2(f"w'_{i}bar", zb)
        backup2(zb, f"w_{i}bar")
    pair_tails = {inst.graph.tail(a) for p in inst.pairs for a in p}
    for x in inst.graph.nodes:
        if x not in pair_tails and x != tp:
            backup2(x, tp)
    chain = [sp] + [b.new_node(f"e_{j}") for j in range(1, 6)] + [tp]
    for j, (x, y) in enumerate(zip(chain, chain[1:]), start=1):
        b.arc(f"e{j}", x, y, 1)
    backup2(chain[1], chain[3])
    backup2(chain[3], chain[5])
    backup2(chain[5], chain[1])
    for x in (chain[0], chain[2], chain[4]):
        backup2(x, tp)
    return b.network(v[1], tp)


def random_fp_instance(seed: int, max_nodes: int = 8, max_pairs: int = 2, tries: int = 200) -> ForbiddenPairsInstance:
    """Seeded small forbidden-pairs instance whose normal form has at most
    ``max_nodes`` nodes and ``max_pairs`` pairs."""
    rng = random.Random(seed)
    for _ in range(tries):
        n = rng.randint(3, 5)
        names = ["s"] + [f"u{i}" for i in range(1, n - 1)] + ["t"]
        cand = [(x, y) for x in names for y in names if x != y and x != "t" and y != "s"]
        m = rng.randint(n - 1, min(len(cand), n + 2))
        chosen = rng.sample(cand, m)
        arcs = [(f"d{i}", x, y) for i, (x, y) in enumerate(chosen, start=1)]
        ids = [a[0] for a in arcs]
        npairs = rng.randint(1, max_pairs)
        if len(ids) < 2 * npairs:
            continue
        picked = rng.sample(ids, 2 * npairs)
        pairs = [(picked[2 * j], picked[2 * j + 1]) for j in range(npairs)]
        inst = normalize_fp(make_fp(arcs, pairs, nodes=names))
        if len(inst.graph.nodes) <= max_nodes:
            return inst
    raise RuntimeError("could not draw an instance within the node bound")
