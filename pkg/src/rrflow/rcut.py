"""R-cuts: capacity, the constructive 2-approximation, and dual certificates."""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .flows import PathFlow, path_decompose
from .graph import (
    DEFAULT_PATH_LIMIT,
    Network,
    NetworkFormatError,
    enumerate_simple_paths,
    format_rational,
    is_cut,
)
from .maxflow import max_flow, min_cut

ZERO = Fraction(0)


class InvalidRCutError(ValueError):
    pass


@dataclass(frozen=True)
class RCut:
    R: frozenset[str]
    cuts: Mapping[str, frozenset[str]]

    @classmethod
    def make(cls, cuts: Mapping[str, object]) -> RCut:
        cuts = {a: frozenset(c) for a, c in cuts.items()}
        return cls(frozenset(cuts), cuts)

    def removed(self) -> frozenset[str]:
        out = set()
        for c in self.cuts.values():
            out |= c
        return frozenset(out)


def check_rcut(net: Network, rc: RCut) -> None:
    if set(rc.R) != set(rc.cuts):
        raise InvalidRCutError("R and the keys of the cut collection differ")
    for a in sorted(rc.R):
        if a not in net.arc:
            raise InvalidRCutError(f"unknown arc {a}")
        c = rc.cuts[a]
        unknown = [b for b in c if b not in net.arc]
        if unknown:
            raise InvalidRCutError(f"cut of {a} names unknown arcs {sorted(unknown)}")
        if a not in c:
            raise InvalidRCutError(f"cut of {a} does not contain {a}")
        if not is_cut(net, c, net.tail(a), net.sink):
            raise InvalidRCutError(f"cut of {a} does not separate {net.tail(a)} from {net.sink}")


def rcut_capacity(net: Network, rc: RCut) -> Fraction:
    check_rcut(net, rc)
    _, phi = min_cut(net, removed=rc.removed())
    return phi + sum((net.capacity[b] for a in rc.R for b in rc.cuts[a] if b != a), ZERO)


def verify_upper_bound(net: Network, rc: RCut, x: PathFlow) -> bool:
    return x.value <= rcut_capacity(net, rc)


@dataclass
class RCutApprox:
    rcut: RCut
    capacity: Fraction
    reduced_caps: dict[str, Fraction]
    bound: Fraction
    witness: PathFlow


def _approx(net: Network):
    cuts: dict[str, frozenset[str]] = {}
    reduced: dict[str, Fraction] = {}
    for a in net.arcs:
        if a.tail == net.sink:
            reduced[a.id] = a.capacity
            continue
        k, val = min_cut(net, start=a.tail, end=net.sink, removed={a.id})
        cuts[a.id] = k | {a.id}
        reduced[a.id] = min(a.capacity, val)
    res = max_flow(net, reduced)
    side = res.min_cut_source_side
    cprime = [a for a in net.arcs if a.tail in side and a.head not in side]
    rc = RCut.make({a.id: cuts[a.id] for a in cprime if reduced[a.id] < a.capacity})
    bound = sum((reduced[a.id] for a in cprime), ZERO)
    assert bound == res.value
    return rc, reduced, bound, path_decompose(net, res.arc_flow)


def approx_min_rcut_details(net: Network) -> RCutApprox:
    rc, reduced, bound, xprime = _approx(net)
    cap = rcut_capacity(net, rc)
    assert cap <= bound
    return RCutApprox(rc, cap, reduced, bound, xprime.scaled(Fraction(1, 2)))


def approx_min_rcut(net: Network) -> tuple[RCut, PathFlow]:
    """R-cut within factor 2 of the minimum, with a strictly reroutable witness.

    Per arc a, C_a is a minimum tail(a)-t cut containing a. Capacities are
    lowered to u'(a) = min(u(a), u(C_a - a)); R collects the arcs of a
    minimum s-t cut under u' whose capacity was lowered. Half of a maximum
    flow under u' is strictly reroutable, so the gap is at most 2.
    """
    out = approx_min_rcut_details(net)
    return out.rcut, out.witness


def half_integral_approx_flow(net: Network) -> PathFlow:
    """Half-integral strictly reroutable flow of value at least OPT/2."""
    if not net.is_integral():
        raise ValueError("capacities must be integral")
    # augmenting paths keep the maximum flow integral under integral u'
    return approx_min_rcut_details(net).witness


# -- dual solutions --------------------------------------------------------


@dataclass
class DualSolution:
    y: dict[tuple[str, str], Fraction] = field(default_factory=dict)
    z: dict[str, Fraction] = field(default_factory=dict)

    def objective(self, net: Network) -> Fraction:
        return sum((net.capacity[a] * v for (_, a), v in self.y.items()), ZERO)


def rcut_to_dual(net: Network, rc: RCut) -> DualSolution:
    """Integral dual solution whose objective equals the R-cut capacity."""
    check_rcut(net, rc)
    removed = rc.removed()
    cstar, _ = min_cut(net, removed=removed)
    dual = DualSolution()
    for f in rc.R:
        dual.z[f] = Fraction(1)
        for a in rc.cuts[f]:
            if a != f:
                dual.y[(f, a)] = Fraction(1)
    for a in cstar:
        dual.y[(a, a)] = dual.y.get((a, a), ZERO) + 1
    return dual


def _shortest(net: Network, cost: Mapping[str, Fraction], start: str, end: str, removed=()) -> Fraction | None:
    removed = set(removed)
    dist = {start: ZERO}
    heap = [(ZERO, 0, start)]
    tick = 1
    done = set()
    while heap:
        d, _, v = heapq.heappop(heap)
        if v in done:
            continue
        if v == end:
            return d
        done.add(v)
        for a in net.out_arcs[v]:
            if a.id in removed:
                continue
            nd = d + cost.get(a.id, ZERO)
            if a.head not in dist or nd < dist[a.head]:
                dist[a.head] = nd
                heapq.heappush(heap, (nd, tick, a.head))
                tick += 1
    return None


def _min_path_cost(net, cost, start, end, removed=(), limit=DEFAULT_PATH_LIMIT):
    if all(c >= 0 for c in cost.values()):
        return _shortest(net, cost, start, end, removed)
    # negative costs: fall back to enumerating simple paths
    paths = enumerate_simple_paths(net, start, end, limit=limit, removed=removed)
    if not paths:
        return None
    return min(sum((cost.get(a, ZERO) for a in p), ZERO) for p in paths)


def check_dual_feasible(net: Network, dual: DualSolution) -> bool:
    """Separation by shortest paths over both constraint families."""
    if any(v < 0 for v in dual.y.values()):
        return False
    cost = {a.id: dual.z.get(a.id, ZERO) for a in net.arcs}
    for (_, a), v in dual.y.items():
        cost[a] += v
    if net.source != net.sink:
        d = _min_path_cost(net, cost, net.source, net.sink)
        if d is not None and d < 1:
            return False
    for f in net.arcs:
        zf = dual.z.get(f.id, ZERO)
        if f.tail == net.sink:
            # the trivial path at t has cost 0
            if zf > 0:
                return False
            continue
        yc = {a.id: dual.y.get((f.id, a.id), ZERO) for a in net.arcs if a.id != f.id}
        d = _min_path_cost(net, yc, f.tail, net.sink, removed={f.id})
        if d is not None and d < zf:
            return False
    return True


# -- file formats ----------------------------------------------------------


def parse_rcut(text: str | bytes) -> RCut:
    """Parse ``R <arcs...>`` followed by ``C <a> <arcs...>`` lines."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    stripped = text.strip()
    if stripped.startswith("{"):
        return rcut_from_json(json.loads(stripped))
    r = None
    cuts: dict[str, list[str]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] == "R":
            if r is not None:
                raise NetworkFormatError("duplicate R line", lineno)
            r = tok[1:]
        elif tok[0] == "C" and len(tok) >= 2:
            if tok[1] in cuts:
                raise NetworkFormatError(f"duplicate cut for {tok[1]}", lineno)
            cuts[tok[1]] = tok[2:]
        else:
            raise NetworkFormatError(f"unexpected line {line!r}", lineno)
    if r is None:
        raise NetworkFormatError("missing R line")
    if set(r) != set(cuts):
        raise NetworkFormatError("every arc of R needs exactly one C line")
    return RCut.make({a: cuts[a] for a in r})


def write_rcut(rc: RCut) -> str:
    lines = [" ".join(["R", *sorted(rc.R)])]
    for a in sorted(rc.R):
        lines.append(" ".join(["C", a, *sorted(rc.cuts[a])]))
    return "\n".join(lines) + "\n"


def rcut_to_json(rc: RCut, capacity: Fraction | None = None) -> dict:
    out = {"R": sorted(rc.R), "cuts": {a: sorted(rc.cuts[a]) for a in sorted(rc.R)}}
    if capacity is not None:
        out["capacity"] = format_rational(capacity)
    return out


def rcut_from_json(doc: dict) -> RCut:
    r = doc.get("R", [])
    cuts = doc.get("cuts", {})
    if set(r) != set(cuts):
        raise NetworkFormatError("every arc of R needs exactly one cut")
    return RCut.make({a: cuts[a] for a in r})
