"""Maximum strictly reroutable flow via the compact arc-flow LP."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .flows import (
    PathFlow,
    ReroutingFlow,
    arc_flow_of,
    check_rerouting,
    path_decompose,
    truncate,
    verify_reroutable,
)
from .graph import Network
from .lp import EQ, LE, OPTIMAL, LinearProgram, solve_lp

ZERO = Fraction(0)


class InternalConsistencyError(RuntimeError):
    """A solver result failed its own certificate check."""


@dataclass
class SrfSolution:
    value: Fraction
    nominal: PathFlow
    reroutings: dict[str, ReroutingFlow] = field(default_factory=dict)
    arc_flow: dict[str, Fraction] = field(default_factory=dict)


def xvar(arc: str) -> str:
    return f"x[{arc}]"


def yvar(failing: str, arc: str) -> str:
    return f"y[{failing}][{arc}]"


def build_compact_srf_lp(net: Network) -> LinearProgram:
    """Arc-flow LP: x is the nominal flow, y_f the rerouting for failing arc f."""
    lp = LinearProgram(sense="max")
    ids = [a.id for a in net.arcs]
    for aid in ids:
        lp.add_variable(xvar(aid))
    for f in ids:
        for aid in ids:
            if aid != f:
                lp.add_variable(yvar(f, aid))

    s, t = net.source, net.sink
    for v in net.nodes:
        if v in (s, t):
            continue
        row = {}
        for a in net.out_arcs[v]:
            row[xvar(a.id)] = row.get(xvar(a.id), 0) + 1
        for a in net.in_arcs[v]:
            row[xvar(a.id)] = row.get(xvar(a.id), 0) - 1
        if row:
            lp.add_constraint(row, EQ, 0, name=f"flow[{v}]")
    # simple s-t paths never enter s or leave t
    for a in net.arcs:
        if a.head == s or a.tail == t:
            lp.add_constraint({xvar(a.id): 1}, LE, 0, name=f"unused[{a.id}]")

    for f in ids:
        start = net.tail(f)
        for v in net.nodes:
            if v == t:
                continue
            row = {}
            for a in net.out_arcs[v]:
                if a.id != f:
                    row[yvar(f, a.id)] = row.get(yvar(f, a.id), 0) + 1
            for a in net.in_arcs[v]:
                if a.id != f:
                    row[yvar(f, a.id)] = row.get(yvar(f, a.id), 0) - 1
            if v == start:
                row[xvar(f)] = row.get(xvar(f), 0) - 1
            if row:
                lp.add_constraint(row, EQ, 0, name=f"reroute[{f}][{v}]")

    for a in ids:
        lp.add_constraint({xvar(a): 1}, LE, net.capacity[a], name=f"cap[{a}]")
        for f in ids:
            if f != a:
                lp.add_constraint({xvar(a): 1, yvar(f, a): 1}, LE, net.capacity[a], name=f"cap[{f}][{a}]")

    obj = {}
    for a in net.out_arcs[s]:
        obj[xvar(a.id)] = obj.get(xvar(a.id), 0) + 1
    for a in net.in_arcs[s]:
        obj[xvar(a.id)] = obj.get(xvar(a.id), 0) - 1
    lp.set_objective(obj)
    return lp


def solve_max_srf(net: Network, method: str = "auto") -> SrfSolution:
    """Exact maximum strictly reroutable flow with per-arc reroutings."""
    lp = build_compact_srf_lp(net)
    out = solve_lp(lp, method=method)
    if out.status != OPTIMAL:
        raise InternalConsistencyError(f"compact LP returned status {out.status}")
    val = out.assignment
    x = {a.id: val.get(xvar(a.id), ZERO) for a in net.arcs}
    nominal = path_decompose(net, x)
    if nominal.value != out.value:
        raise InternalConsistencyError(f"decomposed value {nominal.value} differs from LP value {out.value}")
    flow = arc_flow_of(net, nominal)

    reroutings = {}
    for f in (a.id for a in net.arcs):
        if flow[f] == 0:
            continue
        y = {a.id: val.get(yvar(f, a.id), ZERO) for a in net.arcs if a.id != f}
        paths = path_decompose(net.without_arcs([f]), y, net.tail(f), net.sink)
        rr = ReroutingFlow(f, tuple(truncate(paths.entries, flow[f])))
        if not check_rerouting(net, nominal, rr, strict=True):
            raise InternalConsistencyError(f"rerouting for arc {f} does not verify")
        reroutings[f] = rr
    if not verify_reroutable(net, nominal, strict=True).ok:
        raise InternalConsistencyError("nominal flow is not strictly reroutable")
    return SrfSolution(out.value, nominal, reroutings, flow)


GUARANTEE = "OPT_RF <= 2 * value"


def approx_max_rf(net: Network) -> tuple[PathFlow, Fraction, str]:
    """Reroutable flow of value at least half the maximum reroutable value."""
    sol = solve_max_srf(net)
    return sol.nominal, sol.value, GUARANTEE
