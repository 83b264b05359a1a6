"""Unit-capacity procedures: the half-integral unit-demand algorithm, bad
cuts, and uncrossing a reroutable flow into a strictly reroutable one."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .flows import (
    BudgetExceeded,
    PathFlow,
    ViolatedCut,
    arc_flow_of,
    find_rerouting,
    path_decompose,
    truncate,
    validate_flow,
    verify_reroutable,
)
from .graph import ArcPath, Network, is_cut, out_cut, path_nodes, reachable, st_bridges
from .maxflow import max_flow

ZERO = Fraction(0)
DEFAULT_NODE_BUDGET = 20


def _require_unit(net: Network) -> None:
    if not net.is_unit_capacity():
        raise ValueError("all capacities must equal 1")


# -- unit demand -----------------------------------------------------------


@dataclass
class UnitDemandOutcome:
    feasible: bool
    A0: frozenset[str]
    A1: frozenset[str]
    flow: PathFlow | None = None


def unit_demand_half_integral(net: Network) -> UnitDemandOutcome:
    """Half-integral strictly reroutable flow of value 1, or a cut A0 of
    arcs that no reroutable flow can use."""
    _require_unit(net)
    a0: set[str] = set()
    a1: frozenset[str] = frozenset()
    order = sorted(net.arcs, key=lambda a: a.id)
    changed = True
    while changed:
        changed = False
        for a in order:
            if a.id in a0:
                continue
            if is_cut(net, a1 | {a.id}, a.tail, net.sink):
                a0.add(a.id)
                a1 = st_bridges(net, removed=a0)
                changed = True
                break
    if net.sink not in reachable(net, net.source, a0):
        return UnitDemandOutcome(False, frozenset(a0), a1)
    caps = {a.id: Fraction(2) if a.id in a1 else Fraction(1) for a in net.arcs}
    res = max_flow(net, caps, removed=a0)
    if res.value < 2:
        raise AssertionError("fewer than two units of flow survive the loop")
    paths = truncate(path_decompose(net, res.arc_flow).entries, Fraction(2))
    flow = PathFlow.from_pairs((p, v / 2) for p, v in paths)
    return UnitDemandOutcome(True, frozenset(a0), a1, flow)


# -- strictness and bad cuts -----------------------------------------------


@dataclass(frozen=True)
class StrictViolation:
    failing_arc: str
    cut: frozenset[str]
    side: frozenset[str]
    deficit: Fraction


def strict_violation_cut(net: Network, x: PathFlow) -> StrictViolation | None:
    """A failing arc and a tail-t cut with sum of (1 - x(a)) below 1, or None
    when x is strictly reroutable."""
    _require_unit(net)
    flow = validate_flow(net, x)
    for a in net.arcs:
        if flow[a.id] == 0:
            continue
        out = find_rerouting(net, x, a.id, flow[a.id], strict=True)
        if isinstance(out, ViolatedCut):
            cut = out.arcs | {a.id}
            deficit = sum((1 - flow[b] for b in cut), ZERO)
            assert deficit < 1
            return StrictViolation(a.id, cut, out.source_side, deficit)
    return None


@dataclass
class BadCutReport:
    S: frozenset[str]
    C: frozenset[str]
    witnesses: dict[str, tuple[str, ArcPath]] = field(default_factory=dict)
    non_bad: list[str] = field(default_factory=list)

    @property
    def bad(self) -> bool:
        return bool(self.C) and not self.non_bad


def _crossings(x: PathFlow, cut: frozenset[str]) -> list[tuple[ArcPath, list[str]]]:
    out = []
    for path, val in x.entries:
        if val > 0:
            out.append((path, [a for a in path if a in cut]))
    return out


def is_bad_cut(net: Network, x: PathFlow, S) -> BadCutReport:
    """Classify the arcs of out(S): an arc is bad when some positive path
    crosses it and later crosses the cut again."""
    S = frozenset(S)
    if net.sink in S:
        raise ValueError("S must not contain the sink")
    cut = out_cut(net, S)
    rep = BadCutReport(S, cut)
    for path, cs in _crossings(x, cut):
        for a in cs[:-1]:
            rep.witnesses.setdefault(a, (cs[-1], path))
    rep.non_bad = sorted(a for a in cut if a not in rep.witnesses)
    return rep


def _is_bad_fast(net: Network, crossings_of, S: frozenset[str]) -> bool:
    cut = out_cut(net, S)
    if not cut:
        return False
    bad = set()
    for path in crossings_of:
        cs = [a for a in path if a in cut]
        bad.update(cs[:-1])
    return bad >= cut


def rightmost_bad_cut(net: Network, x: PathFlow, max_nodes: int = DEFAULT_NODE_BUDGET) -> BadCutReport | None:
    """Union of all node sets whose out-cut is x-bad, or None."""
    others = [v for v in net.nodes if v != net.sink]
    if len(others) + 1 > max_nodes:
        raise BudgetExceeded(f"{len(others) + 1} nodes exceed the budget of {max_nodes}")
    support = [p for p, v in x.entries if v > 0]
    union: set[str] = set()
    for mask in range(1, 1 << len(others)):
        S = frozenset(others[i] for i in range(len(others)) if mask >> i & 1)
        if S <= union:
            # a subset of the current union cannot enlarge it
            continue
        if _is_bad_fast(net, support, S):
            union |= S
    if not union:
        return None
    rep = is_bad_cut(net, x, union)
    if not rep.bad:
        raise AssertionError("union of bad cuts is not bad")
    return rep


# -- uncrossing ------------------------------------------------------------


@dataclass
class UncrossCertificate:
    Cstar: BadCutReport
    cycle_arcs: list[str]
    cycle_paths: list[ArcPath]
    epsilon: Fraction
    new_paths: list[ArcPath]
    total_before: Fraction
    total_after: Fraction


def splice(net: Network, first: ArcPath, second: ArcPath, arc: str) -> ArcPath:
    """Simple path inside first[s, head(arc)] followed by second[head(arc), t]."""
    h = net.head(arc)
    prefix = first[: first.index(arc) + 1]
    suffix = second[second.index(arc) + 1:]
    suffix_nodes = [h] + [net.head(a) for a in suffix]
    pos = {v: i for i, v in enumerate(suffix_nodes)}
    nodes1 = path_nodes(net, prefix)
    for i, v in enumerate(nodes1):
        if v in pos:
            return prefix[:i] + suffix[pos[v]:]
    raise AssertionError("head of the splice arc missing from the suffix")


def uncross_step(net: Network, x: PathFlow, report: BadCutReport) -> tuple[PathFlow, UncrossCertificate]:
    """Splice a cycle of paths on a bad cut; value stays, total arc flow drops."""
    if not report.bad:
        raise ValueError("the cut is not x-bad")
    cstar = report.C
    # H: arc a -> a' labelled by a support path through a whose last cut arc is a'
    succ: dict[str, tuple[str, ArcPath]] = {}
    for path, cs in _crossings(x, cstar):
        for a in cs[:-1]:
            succ.setdefault(a, (cs[-1], path))
    start = min(cstar)
    seen: dict[str, int] = {}
    walk = []
    node = start
    while node not in seen:
        seen[node] = len(walk)
        walk.append(node)
        node = succ[node][0]
    cycle = walk[seen[node]:]
    k = len(cycle)
    # a_i = cycle[i]; P_{i+1} labels cycle[i] -> cycle[i+1]
    arcs_ = cycle
    paths_ = [succ[cycle[(i - 1) % k]][1] for i in range(k)]
    values = x.as_dict()
    eps = min(values[p] for p in paths_)
    new_paths = [splice(net, paths_[(i + 1) % k], paths_[i], arcs_[i]) for i in range(k)]
    pairs = list(x.entries)
    pairs += [(p, -eps) for p in paths_]
    pairs += [(p, eps) for p in new_paths]
    acc: dict[ArcPath, Fraction] = {}
    for p, v in pairs:
        acc[p] = acc.get(p, ZERO) + v
    if any(v < 0 for v in acc.values()):
        raise AssertionError("uncrossing produced a negative path value")
    y = PathFlow.from_pairs(acc.items())

    fx, fy = arc_flow_of(net, x), arc_flow_of(net, y)
    before, after = sum(fx.values(), ZERO), sum(fy.values(), ZERO)
    if y.value != x.value:
        raise AssertionError("uncrossing changed the flow value")
    if any(fy[a] > fx[a] for a in fx):
        raise AssertionError("uncrossing increased some arc flow")
    if not after < before:
        raise AssertionError("uncrossing did not decrease the total arc flow")
    cert = UncrossCertificate(report, list(arcs_), list(paths_), eps, new_paths, before, after)
    return y, cert


def make_strict(
    net: Network,
    x: PathFlow,
    max_nodes: int = DEFAULT_NODE_BUDGET,
    trace: list | None = None,
    max_iterations: int | None = None,
) -> PathFlow:
    """Uncross a reroutable unit-capacity flow until it is strictly reroutable.

    Value is preserved and arc flows never increase. Certificates of every
    step are appended to ``trace`` when given.
    """
    _require_unit(net)
    if not verify_reroutable(net, x, strict=False).ok:
        raise ValueError("input flow is not reroutable")
    if max_iterations is None:
        dens = max((v.denominator for _, v in x.entries), default=1)
        max_iterations = max(1, len(net.arcs) * max(1, len(x)) * dens * 4)
    for _ in range(max_iterations):
        if strict_violation_cut(net, x) is None:
            return x
        rep = rightmost_bad_cut(net, x, max_nodes)
        if rep is None:
            raise AssertionError("strictness fails but no bad cut exists")
        x, cert = uncross_step(net, x, rep)
        if trace is not None:
            trace.append(cert)
    raise RuntimeError(f"no strict flow after {max_iterations} uncrossing steps")
