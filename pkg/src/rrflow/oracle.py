"""Brute-force exact references for tiny instances.

Everything here enumerates paths, node sets or failure sets and is only
meant to certify the polynomial procedures on small inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterable

from .flows import (
    BudgetExceeded,
    PathFlow,
    arc_flow_of,
    interrupted_values,
    rerouting_capacities,
    verify_reroutable,
)
from .graph import (
    Arc,
    ArcPath,
    Network,
    PathLimitExceeded,
    coreachable,
    enumerate_simple_paths,
    reachable,
)
from .lp import EQ, LE, OPTIMAL, LinearProgram, solve_lp
from .maxflow import max_flow
from .rcut import RCut, rcut_capacity

ZERO = Fraction(0)


@dataclass(frozen=True)
class OracleBudget:
    max_paths: int = 10_000
    max_nodes: int = 12
    max_failure_sets: int = 5_000

    def __post_init__(self):
        if min(self.max_paths, self.max_nodes, self.max_failure_sets) <= 0:
            raise ValueError("budget entries must be positive")


DEFAULT_BUDGET = OracleBudget()


def _paths(net: Network, start: str, end: str, budget: OracleBudget, removed=()) -> list[ArcPath]:
    try:
        return enumerate_simple_paths(net, start, end, limit=budget.max_paths, removed=removed)
    except PathLimitExceeded as exc:
        raise BudgetExceeded(str(exc)) from None


def dead_arcs(net: Network) -> frozenset[str]:
    """Arcs that carry no flow in any reroutable flow: after their own
    failure their tail cannot reach the sink."""
    out = set()
    for a in net.arcs:
        if a.tail == net.sink or net.sink not in reachable(net, a.tail, {a.id}):
            out.add(a.id)
    return frozenset(out)


def _nominal_paths(net: Network, budget: OracleBudget) -> list[ArcPath]:
    return _paths(net, net.source, net.sink, budget, removed=dead_arcs(net))


def _pvar(i: int) -> str:
    return f"x[{i}]"


def _path_lp(net: Network, budget: OracleBudget, strict: bool):
    """Path LP over enumerated nominal paths and enumerated rerouting paths."""
    paths = _nominal_paths(net, budget)
    lp = LinearProgram(sense="max")
    for i in range(len(paths)):
        lp.add_variable(_pvar(i))
    lp.set_objective({_pvar(i): 1 for i in range(len(paths))})
    on_arc: dict[str, list[int]] = {a.id: [] for a in net.arcs}
    for i, p in enumerate(paths):
        for aid in p:
            on_arc[aid].append(i)
    for a in net.arcs:
        if on_arc[a.id]:
            lp.add_constraint({_pvar(i): 1 for i in on_arc[a.id]}, LE, a.capacity, name=f"cap[{a.id}]")
    for f in net.arcs:
        if not on_arc[f.id]:
            continue
        reroutes = _paths(net, f.tail, net.sink, budget, removed={f.id})
        names = []
        for j in range(len(reroutes)):
            names.append(lp.add_variable(f"r[{f.id}][{j}]"))
        row = {_pvar(i): 1 for i in on_arc[f.id]}
        for n in names:
            row[n] = row.get(n, 0) - 1
        lp.add_constraint(row, EQ, 0, name=f"demand[{f.id}]")
        using: dict[str, list[str]] = {}
        for n, r in zip(names, reroutes):
            for aid in r:
                using.setdefault(aid, []).append(n)
        for aid, rs in using.items():
            row = {n: 1 for n in rs}
            for i in on_arc[aid]:
                p = paths[i]
                if strict or not (f.id in p and p.index(f.id) < p.index(aid)):
                    row[_pvar(i)] = row.get(_pvar(i), 0) + 1
            lp.add_constraint(row, LE, net.capacity[aid], name=f"cap[{f.id}][{aid}]")
    return lp, paths


def _solve_paths(net: Network, budget: OracleBudget, strict: bool) -> tuple[Fraction, PathFlow]:
    lp, paths = _path_lp(net, budget, strict)
    if not paths:
        return ZERO, PathFlow()
    out = solve_lp(lp)
    if out.status != OPTIMAL:
        raise RuntimeError(f"path LP returned {out.status}")
    x = PathFlow.from_pairs((p, out.assignment.get(_pvar(i), ZERO)) for i, p in enumerate(paths))
    return out.value, x


def oracle_rf_witness(
    net: Network,
    value=None,
    budget: OracleBudget = DEFAULT_BUDGET,
    strict: bool = False,
) -> PathFlow | None:
    """Reroutable flow of the given value (default: the maximum) with the
    largest total arc flow, or None if that value is not attainable.

    Long witnesses tend to cross cuts repeatedly, which makes them useful
    inputs for uncrossing.
    """
    lp, paths = _path_lp(net, budget, strict)
    if not paths:
        return None if value else PathFlow()
    if value is None:
        out = solve_lp(lp)
        if out.status != OPTIMAL:
            raise RuntimeError(f"path LP returned {out.status}")
        value = out.value
    lp.add_constraint(dict(lp.objective), EQ, value, name="value")
    lp.set_objective({_pvar(i): len(p) for i, p in enumerate(paths)})
    out = solve_lp(lp)
    if out.status != OPTIMAL:
        return None
    return PathFlow.from_pairs((p, out.assignment.get(_pvar(i), ZERO)) for i, p in enumerate(paths))


def oracle_max_srf_paths(net: Network, budget: OracleBudget = DEFAULT_BUDGET) -> tuple[Fraction, PathFlow]:
    """Maximum strictly reroutable flow from the path LP."""
    return _solve_paths(net, budget, strict=True)


def oracle_max_rf(net: Network, budget: OracleBudget = DEFAULT_BUDGET) -> tuple[Fraction, PathFlow]:
    """Maximum reroutable flow from the path LP with failure-aware capacities."""
    return _solve_paths(net, budget, strict=False)


# -- multiple failures -----------------------------------------------------


def _failure_sets(net: Network, k: int, budget: OracleBudget, carrying: Iterable[str]):
    ids = [a.id for a in net.arcs]
    total = sum(comb(len(ids), i) for i in range(1, min(k, len(ids)) + 1))
    if total > budget.max_failure_sets:
        raise BudgetExceeded(f"{total} failure sets exceed the budget of {budget.max_failure_sets}")
    carrying = set(carrying)
    for size in range(1, min(k, len(ids)) + 1):
        for s in combinations(ids, size):
            if not carrying.isdisjoint(s):
                yield frozenset(s)


class _KChecker:
    """Joint rerouting feasibility for many failure sets of a fixed flow.

    One auxiliary network with a supply arc from a super source to the tail
    of every arc; each failure set only changes capacities.
    """

    ROOT = "__root"

    def __init__(self, net: Network):
        self.net = net
        arcs = list(net.arcs)
        for a in net.arcs:
            arcs.append(Arc(f"__supply[{a.id}]", self.ROOT, a.tail, Fraction(0)))
        self.aux = Network(net.nodes + (self.ROOT,), tuple(arcs), self.ROOT, net.sink)

    def feasible(self, x: PathFlow, failed: frozenset[str], strict: bool) -> bool:
        scen = interrupted_values(self.net, x, failed)
        if scen.total == 0:
            return True
        caps = rerouting_capacities(self.net, x, failed, strict)
        for a in self.net.arcs:
            caps[f"__supply[{a.id}]"] = scen.interrupted.get(a.id, ZERO)
        res = max_flow(self.aux, caps, removed=failed)
        return res.value == scen.total


def _add_failure_block(lp: LinearProgram, net: Network, paths: list[ArcPath], failed: frozenset[str], tag: int, strict: bool):
    """Rows requiring a joint rerouting for ``failed`` as one arc flow."""
    first_hit: dict[str, list[int]] = {f: [] for f in failed}
    for i, p in enumerate(paths):
        for aid in p:
            if aid in failed:
                first_hit[aid].append(i)
                break
    tails = {net.tail(f) for f in failed if first_hit[f]}
    fwd = set()
    for v in tails:
        fwd |= reachable(net, v, failed)
    live = fwd & coreachable(net, net.sink, failed)
    # interrupted flow at a tail that cannot reach the sink must be zero
    for f in sorted(failed):
        if first_hit[f] and net.tail(f) not in live:
            lp.add_constraint({_pvar(i): 1 for i in first_hit[f]}, LE, 0, name=f"stranded[{tag}][{f}]")
    arcs = [a for a in net.arcs if a.id not in failed and a.tail in live and a.head in live]
    yv = {a.id: lp.add_variable(f"y[{tag}][{a.id}]") for a in arcs}
    for v in sorted(live):
        if v == net.sink:
            continue
        row: dict[str, Fraction] = {}
        for a in net.out_arcs[v]:
            if a.id in yv:
                row[yv[a.id]] = row.get(yv[a.id], 0) + 1
        for a in net.in_arcs[v]:
            if a.id in yv:
                row[yv[a.id]] = row.get(yv[a.id], 0) - 1
        for f in failed:
            if net.tail(f) == v:
                for i in first_hit[f]:
                    row[_pvar(i)] = row.get(_pvar(i), 0) - 1
        if row:
            lp.add_constraint(row, EQ, 0, name=f"kflow[{tag}][{v}]")
    for a in arcs:
        row = {yv[a.id]: 1}
        for i, p in enumerate(paths):
            if a.id not in p:
                continue
            if strict:
                row[_pvar(i)] = row.get(_pvar(i), 0) + 1
                continue
            hit_before = False
            for aid in p:
                if aid == a.id:
                    break
                if aid in failed:
                    hit_before = True
                    break
            if not hit_before:
                row[_pvar(i)] = row.get(_pvar(i), 0) + 1
        lp.add_constraint(row, LE, a.capacity, name=f"kcap[{tag}][{a.id}]")


def oracle_max_k_rf(
    net: Network,
    k: int,
    budget: OracleBudget = DEFAULT_BUDGET,
    strict: bool = False,
    batch: int = 25,
) -> tuple[Fraction, PathFlow]:
    """Maximum k-reroutable flow.

    Failure sets enter the LP lazily: solve with the sets found so far, check
    the optimum against every failure set, add violated ones, repeat. The
    loop stops at a flow that survives all sets, which is then optimal
    because every intermediate LP is a relaxation.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    paths = _nominal_paths(net, budget)
    if not paths:
        return ZERO, PathFlow()
    on_path = {aid for p in paths for aid in p}
    all_sets = list(_failure_sets(net, k, budget, on_path))
    lp = LinearProgram(sense="max")
    for i in range(len(paths)):
        lp.add_variable(_pvar(i))
    lp.set_objective({_pvar(i): 1 for i in range(len(paths))})
    for a in net.arcs:
        row = {_pvar(i): 1 for i, p in enumerate(paths) if a.id in p}
        if row:
            lp.add_constraint(row, LE, a.capacity, name=f"cap[{a.id}]")
    added: set[frozenset[str]] = set()
    for s in all_sets:
        if len(s) == 1:
            _add_failure_block(lp, net, paths, s, len(added), strict)
            added.add(s)
    checker = _KChecker(net)
    while True:
        out = solve_lp(lp)
        if out.status != OPTIMAL:
            raise RuntimeError(f"k-failure LP returned {out.status}")
        x = PathFlow.from_pairs((p, out.assignment.get(_pvar(i), ZERO)) for i, p in enumerate(paths))
        support = {a for a, v in arc_flow_of(net, x).items() if v > 0}
        violated = []
        for s in all_sets:
            if s in added or support.isdisjoint(s):
                continue
            if not checker.feasible(x, s, strict):
                violated.append(s)
                if len(violated) >= batch:
                    break
        if not violated:
            return out.value, x
        for s in violated:
            _add_failure_block(lp, net, paths, s, len(added), strict)
            added.add(s)


# -- R-cuts ----------------------------------------------------------------


def _node_subsets(nodes: list[str], must: str, avoid: str):
    """All node sets containing ``must`` and not ``avoid``."""
    others = [v for v in nodes if v not in (must, avoid)]
    for mask in range(1 << len(others)):
        yield {must} | {others[i] for i in range(len(others)) if mask >> i & 1}


def _out_arcs_of(net: Network, side: set[str], removed=frozenset()) -> frozenset[str]:
    return frozenset(a.id for a in net.arcs if a.id not in removed and a.tail in side and a.head not in side)


def _minimal_cuts(net: Network, arc: Arc) -> list[frozenset[str]]:
    """Inclusion-minimal tail(arc)-t cuts of the network without ``arc``."""
    cuts = {
        _out_arcs_of(net, side, {arc.id})
        for side in _node_subsets(list(net.nodes), arc.tail, net.sink)
    }
    return [c for c in cuts if not any(d < c for d in cuts)]


def oracle_min_rcut(net: Network, budget: OracleBudget = DEFAULT_BUDGET) -> tuple[RCut, Fraction]:
    """Exact minimum R-cut.

    For a fixed s-t cut U = out(S), the cheapest R-cut whose residual
    network is cut by S is a weighted cover of U: an arc b of U is either
    paid for directly (u(b)) or lies in some C_a. Only a in U and
    inclusion-minimal C_a - a need to be considered, so a subset dynamic
    program over U is exact.
    """
    if len(net.nodes) > budget.max_nodes:
        raise BudgetExceeded(f"{len(net.nodes)} nodes exceed the budget of {budget.max_nodes}")
    options: dict[str, list[frozenset[str]]] = {}
    for a in net.arcs:
        if a.tail != net.sink:
            options[a.id] = _minimal_cuts(net, a)
    best = None
    for side in _node_subsets(list(net.nodes), net.source, net.sink):
        cut = sorted(_out_arcs_of(net, side))
        bit = {b: 1 << i for i, b in enumerate(cut)}

        def mask_of(arcs):
            m = 0
            for b in arcs:
                m |= bit.get(b, 0)
            return m

        dp: dict[int, tuple[Fraction, tuple]] = {0: (ZERO, ())}
        for a in cut:
            nxt = dict(dp)
            for m, (cost, chosen) in dp.items():
                for k_arcs in options.get(a, ()):
                    m2 = m | bit[a] | mask_of(k_arcs)
                    c2 = cost + sum((net.capacity[b] for b in k_arcs), ZERO)
                    if m2 not in nxt or c2 < nxt[m2][0]:
                        nxt[m2] = (c2, chosen + ((a, k_arcs),))
            dp = nxt
        for m, (cost, chosen) in dp.items():
            total = cost + sum((net.capacity[b] for b in cut if not m & bit[b]), ZERO)
            if best is None or total < best[0]:
                best = (total, chosen)
    value, chosen = best
    rc = RCut.make({a: k_arcs | {a} for a, k_arcs in chosen})
    cap = rcut_capacity(net, rc)
    if cap != value:
        raise RuntimeError(f"reconstructed R-cut has capacity {cap}, expected {value}")
    return rc, value


# -- unit capacities -------------------------------------------------------


def oracle_strict_check_cuts(net: Network, x: PathFlow, budget: OracleBudget = DEFAULT_BUDGET) -> bool:
    """Unit capacities: x is strictly reroutable iff every nonempty
    t-separating cut out(S) has sum of (1 - x(a)) at least 1."""
    if not net.is_unit_capacity():
        raise ValueError("unit capacities required")
    if len(net.nodes) > budget.max_nodes:
        raise BudgetExceeded(f"{len(net.nodes)} nodes exceed the cut enumeration budget")
    flow = arc_flow_of(net, x)
    others = [v for v in net.nodes if v != net.sink]
    for mask in range(1, 1 << len(others)):
        side = {others[i] for i in range(len(others)) if mask >> i & 1}
        cut = _out_arcs_of(net, side)
        if cut and sum((1 - flow[a] for a in cut), ZERO) < 1:
            return False
    return True


def oracle_integral_unit_flow(net: Network, budget: OracleBudget = DEFAULT_BUDGET) -> ArcPath | None:
    """First s-t path whose unit flow is reroutable, if any."""
    for path in _paths(net, net.source, net.sink, budget):
        if any(net.capacity[a] < 1 for a in path):
            continue
        if verify_reroutable(net, PathFlow.from_pairs([(path, 1)]), strict=False).ok:
            return path
    return None
