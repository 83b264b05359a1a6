"""Path flows, available capacities after failures, and reroutability checks."""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterable, Mapping

from .graph import ArcPath, Network, check_path, format_rational, parse_rational, NetworkFormatError
from .maxflow import max_flow

ZERO = Fraction(0)


class InvalidFlowError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class PathFlow:
    """Flow values on s-t paths. Duplicate paths are merged, zeros dropped."""

    entries: tuple[tuple[ArcPath, Fraction], ...] = ()

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[Iterable[str], object]]) -> PathFlow:
        acc: dict[ArcPath, Fraction] = {}
        for path, val in pairs:
            path = tuple(path)
            val = Fraction(val)
            if val < 0:
                raise InvalidFlowError(f"negative value {val} on path {path}")
            acc[path] = acc.get(path, ZERO) + val
        return cls(tuple((p, v) for p, v in acc.items() if v != 0))

    @property
    def value(self) -> Fraction:
        return sum((v for _, v in self.entries), ZERO)

    @property
    def paths(self) -> list[ArcPath]:
        return [p for p, _ in self.entries]

    def as_dict(self) -> dict[ArcPath, Fraction]:
        return dict(self.entries)

    def scaled(self, factor) -> PathFlow:
        factor = Fraction(factor)
        return PathFlow.from_pairs((p, v * factor) for p, v in self.entries)

    def is_multiple_of(self, alpha) -> bool:
        alpha = Fraction(alpha)
        return all((v / alpha).denominator == 1 for _, v in self.entries)

    def __len__(self):
        return len(self.entries)


def parse_flow(text: str | bytes) -> PathFlow:
    """Parse ``f <value> <arc> ...`` lines."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] != "f" or len(tok) < 3:
            raise NetworkFormatError("expected 'f <value> <arc> ...'", lineno)
        try:
            val = parse_rational(tok[1])
        except ValueError as exc:
            raise NetworkFormatError(str(exc), lineno) from None
        if val < 0:
            raise NetworkFormatError("negative path value", lineno)
        pairs.append((tuple(tok[2:]), val))
    return PathFlow.from_pairs(pairs)


def write_flow(x: PathFlow) -> str:
    return "".join(f"f {format_rational(v)} {' '.join(p)}\n" for p, v in x.entries)


def arc_flow_of(net: Network, x: PathFlow) -> dict[str, Fraction]:
    flow = {a.id: ZERO for a in net.arcs}
    for path, val in x.entries:
        for aid in path:
            flow[aid] += val
    return flow


def validate_flow(net: Network, x: PathFlow) -> dict[str, Fraction]:
    """Check paths and capacities; return the arc flow."""
    for path, val in x.entries:
        try:
            check_path(net, path, net.source, net.sink)
        except ValueError as exc:
            raise InvalidFlowError(f"path {' '.join(path)}: {exc}") from None
        if val < 0:
            raise InvalidFlowError(f"negative value on path {' '.join(path)}")
    flow = arc_flow_of(net, x)
    for aid, f in flow.items():
        if f > net.capacity[aid]:
            raise InvalidFlowError(f"arc {aid} carries {f} > capacity {net.capacity[aid]}")
    return flow


def _traverses_before(path: ArcPath, first: str, later: str) -> bool:
    try:
        return path.index(first) < path.index(later)
    except ValueError:
        return False


def available_capacity(net: Network, x: PathFlow, failing: str, arc: str, strict: bool) -> Fraction:
    """Capacity of ``arc`` left for rerouting when ``failing`` fails.

    strict: u(a) - x(a). Otherwise flow that crossed ``failing`` before
    reaching ``arc`` is not charged, since it was interrupted upstream.
    """
    if arc == failing:
        raise ValueError("the failing arc has no available capacity")
    used = ZERO
    for path, val in x.entries:
        if arc in path and (strict or not _traverses_before(path, failing, arc)):
            used += val
    return net.capacity[arc] - used


def rerouting_capacities(net: Network, x: PathFlow, failed: Iterable[str], strict: bool) -> dict[str, Fraction]:
    """Available capacity of every surviving arc after ``failed`` fail."""
    failed = set(failed)
    used = {a.id: ZERO for a in net.arcs}
    for path, val in x.entries:
        hit = False
        for aid in path:
            if aid in failed:
                hit = True
            elif strict or not hit:
                used[aid] += val
    return {a.id: net.capacity[a.id] - used[a.id] for a in net.arcs if a.id not in failed}


@dataclass(frozen=True)
class ReroutingFlow:
    failing_arc: str
    entries: tuple[tuple[ArcPath, Fraction], ...]

    @property
    def value(self) -> Fraction:
        return sum((v for _, v in self.entries), ZERO)


@dataclass(frozen=True)
class ViolatedCut:
    failing_arc: str
    arcs: frozenset[str]
    slack: Fraction
    source_side: frozenset[str] = frozenset()


@dataclass
class RerouteVerdict:
    strict: bool
    ok: bool
    per_arc: dict[str, ReroutingFlow | ViolatedCut] = field(default_factory=dict)

    def failures(self) -> dict[str, ViolatedCut]:
        return {k: v for k, v in self.per_arc.items() if isinstance(v, ViolatedCut)}


def path_decompose(
    net: Network,
    arc_flow: Mapping[str, Fraction],
    start: str | None = None,
    end: str | None = None,
) -> PathFlow:
    """Greedy decomposition of a start-end arc flow into simple paths.

    Flow left once the start's net outflow is exhausted is a circulation
    and is dropped.
    """
    start = net.source if start is None else start
    end = net.sink if end is None else end
    rest = {aid: Fraction(v) for aid, v in arc_flow.items() if v != 0}
    for aid, v in rest.items():
        if v < 0:
            raise InvalidFlowError(f"negative flow on arc {aid}")
    balance = defaultdict(Fraction)
    for aid, v in rest.items():
        a = net.arc[aid]
        balance[a.tail] += v
        balance[a.head] -= v
    for node, b in balance.items():
        if node not in (start, end) and b != 0:
            raise InvalidFlowError(f"flow conservation violated at node {node}")
    remaining = balance[start]
    if remaining < 0:
        raise InvalidFlowError("negative net outflow at start node")
    pairs = []
    while remaining > 0:
        # BFS in the support graph gives a simple path
        pred = {start: None}
        queue = deque([start])
        while queue and end not in pred:
            v = queue.popleft()
            for a in net.out_arcs[v]:
                if rest.get(a.id, 0) > 0 and a.head not in pred:
                    pred[a.head] = a.id
                    queue.append(a.head)
        if end not in pred:
            raise InvalidFlowError("support has no path although outflow remains")
        path = []
        v = end
        while v != start:
            aid = pred[v]
            path.append(aid)
            v = net.arc[aid].tail
        path.reverse()
        amount = min(min(rest[aid] for aid in path), remaining)
        for aid in path:
            rest[aid] -= amount
        remaining -= amount
        pairs.append((tuple(path), amount))
    return PathFlow.from_pairs(pairs)


def truncate(entries: Iterable[tuple[ArcPath, Fraction]], amount: Fraction) -> list[tuple[ArcPath, Fraction]]:
    """Take paths in order until their values add up to ``amount``."""
    out = []
    left = Fraction(amount)
    for path, val in entries:
        if left <= 0:
            break
        take = min(val, left)
        out.append((path, take))
        left -= take
    return out


def find_rerouting(
    net: Network,
    x: PathFlow,
    failing: str,
    demand: Fraction | None = None,
    strict: bool = False,
) -> ReroutingFlow | ViolatedCut:
    """Reroute ``demand`` (default x(failing)) from tail(failing) to the sink."""
    if demand is None:
        demand = arc_flow_of(net, x)[failing]
    demand = Fraction(demand)
    start = net.tail(failing)
    if demand == 0 or start == net.sink:
        return ReroutingFlow(failing, ())
    caps = rerouting_capacities(net, x, [failing], strict)
    res = max_flow(net, caps, start, net.sink, removed={failing})
    if res.value >= demand:
        paths = path_decompose(net, res.arc_flow, start, net.sink)
        return ReroutingFlow(failing, tuple(truncate(paths.entries, demand)))
    side = res.min_cut_source_side
    cut = frozenset(
        a.id for a in net.arcs if a.id != failing and a.tail in side and a.head not in side
    )
    return ViolatedCut(failing, cut, res.value, frozenset(side))


def verify_reroutable(net: Network, x: PathFlow, strict: bool = False) -> RerouteVerdict:
    """Check that every failing arc carrying flow admits a rerouting."""
    flow = validate_flow(net, x)
    verdict = RerouteVerdict(strict=strict, ok=True)
    for a in net.arcs:
        if flow[a.id] == 0:
            continue
        out = find_rerouting(net, x, a.id, flow[a.id], strict)
        verdict.per_arc[a.id] = out
        if isinstance(out, ViolatedCut):
            verdict.ok = False
    return verdict


def check_rerouting(net: Network, x: PathFlow, rerouting: ReroutingFlow, strict: bool) -> bool:
    """Independent check of a rerouting certificate."""
    failing = rerouting.failing_arc
    start = net.tail(failing)
    caps = rerouting_capacities(net, x, [failing], strict)
    used = defaultdict(Fraction)
    for path, val in rerouting.entries:
        if val < 0 or failing in path:
            return False
        try:
            check_path(net, path, start, net.sink)
        except ValueError:
            return False
        for aid in path:
            used[aid] += val
    if any(used[aid] > caps[aid] for aid in used):
        return False
    return rerouting.value == arc_flow_of(net, x)[failing]


# -- multiple failures -----------------------------------------------------


@dataclass(frozen=True)
class FailureScenario:
    failed: frozenset[str]
    interrupted: dict[str, Fraction]

    @property
    def total(self) -> Fraction:
        return sum(self.interrupted.values(), ZERO)


def interrupted_values(net: Network, x: PathFlow, failed: Iterable[str]) -> FailureScenario:
    """Charge each path's value to the first failed arc it meets."""
    failed = frozenset(failed)
    if not failed:
        raise ValueError("failure set must be nonempty")
    interrupted = {aid: ZERO for aid in failed}
    for path, val in x.entries:
        for aid in path:
            if aid in failed:
                interrupted[aid] += val
                break
    return FailureScenario(failed, interrupted)


@dataclass(frozen=True)
class MultiRerouting:
    failed: frozenset[str]
    flows: dict[str, tuple[tuple[ArcPath, Fraction], ...]]


@dataclass
class KRerouteVerdict:
    k: int
    strict: bool
    ok: bool
    per_set: dict[frozenset[str], MultiRerouting | ViolatedCut] = field(default_factory=dict)


SUPER_SOURCE = "__super_source"


def find_multi_rerouting(net: Network, x: PathFlow, failed: Iterable[str], strict: bool = False):
    """Joint rerouting for a failure set via a super-source max flow."""
    from .graph import Arc  # local: only needed to assemble the auxiliary network

    scenario = interrupted_values(net, x, failed)
    failed = scenario.failed
    if scenario.total == 0:
        return MultiRerouting(failed, {})
    caps = rerouting_capacities(net, x, failed, strict)
    arcs = [a for a in net.arcs if a.id not in failed]
    supply = {}
    for aid in sorted(failed):
        if scenario.interrupted[aid] > 0:
            sid = f"__supply__{aid}"
            supply[sid] = aid
            arcs.append(Arc(sid, SUPER_SOURCE, net.tail(aid), scenario.interrupted[aid]))
    aux = Network(net.nodes + (SUPER_SOURCE,), tuple(arcs), SUPER_SOURCE, net.sink)
    aux_caps = dict(caps)
    for sid, aid in supply.items():
        aux_caps[sid] = scenario.interrupted[aid]
    res = max_flow(aux, aux_caps, SUPER_SOURCE, net.sink)
    if res.value < scenario.total:
        side = res.min_cut_source_side
        cut = frozenset(a.id for a in aux.arcs if a.tail in side and a.head not in side)
        return ViolatedCut(",".join(sorted(failed)), cut, res.value, frozenset(side) - {SUPER_SOURCE})
    flows: dict[str, list] = defaultdict(list)
    for path, val in path_decompose(aux, res.arc_flow).entries:
        flows[supply[path[0]]].append((path[1:], val))
    return MultiRerouting(failed, {aid: tuple(v) for aid, v in flows.items()})


def verify_k_reroutable(
    net: Network,
    x: PathFlow,
    k: int,
    strict: bool = False,
    max_failure_sets: int = 200_000,
) -> KRerouteVerdict:
    """Check reroutability for every failure set of size at most ``k``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    validate_flow(net, x)
    ids = [a.id for a in net.arcs]
    count = sum(comb(len(ids), i) for i in range(1, min(k, len(ids)) + 1))
    if count > max_failure_sets:
        raise BudgetExceeded(f"{count} failure sets exceed the budget of {max_failure_sets}")
    carrying = {aid for aid, f in arc_flow_of(net, x).items() if f > 0}
    verdict = KRerouteVerdict(k, strict, True)
    for size in range(1, min(k, len(ids)) + 1):
        for subset in combinations(ids, size):
            if carrying.isdisjoint(subset):
                continue
            out = find_multi_rerouting(net, x, subset, strict)
            verdict.per_set[frozenset(subset)] = out
            if isinstance(out, ViolatedCut):
                verdict.ok = False
    return verdict
