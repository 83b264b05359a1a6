"""Directed multigraphs with exact rational capacities.

Nodes and arcs carry string ids. Paths are tuples of arc ids, because
parallel arcs make node sequences ambiguous. Everything here is immutable;
helpers that "modify" a network return a new one.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Mapping

ArcPath = tuple[str, ...]

DEFAULT_PATH_LIMIT = 100_000

_INT_RE = re.compile(r"^-?\d+$")
_RATIONAL_RE = re.compile(r"^(-?\d+)(?:/(\d+))?$")


class NetworkFormatError(ValueError):
    """Raised for malformed instance or flow files."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class PathLimitExceeded(RuntimeError):
    pass


def parse_rational(token: str) -> Fraction:
    """Parse ``<int>`` or ``<int>/<int>`` into a Fraction."""
    m = _RATIONAL_RE.match(token)
    if not m:
        raise ValueError(f"not a rational: {token!r}")
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator: {token!r}")
    return Fraction(int(m.group(1)), den)


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Arc:
    id: str
    tail: str
    head: str
    capacity: Fraction


@dataclass(frozen=True)
class Network:
    nodes: tuple[str, ...]
    arcs: tuple[Arc, ...]
    source: str
    sink: str

    def __post_init__(self):
        if self.source == self.sink:
            raise ValueError("source and sink must differ")
        node_set = set(self.nodes)
        if len(node_set) != len(self.nodes):
            raise ValueError("duplicate node id")
        for v in (self.source, self.sink):
            if v not in node_set:
                raise ValueError(f"unknown node {v!r}")
        seen = set()
        for a in self.arcs:
            if a.id in seen:
                raise ValueError(f"duplicate arc id {a.id!r}")
            seen.add(a.id)
            if a.tail not in node_set or a.head not in node_set:
                raise ValueError(f"arc {a.id!r} references an unknown node")
            if a.capacity < 0:
                raise ValueError(f"arc {a.id!r} has negative capacity")

    @classmethod
    def build(
        cls,
        arcs: Iterable[tuple[str, str, str, object]],
        source: str = "s",
        sink: str = "t",
        nodes: Iterable[str] | None = None,
    ) -> Network:
        """Convenience constructor from ``(id, tail, head, capacity)`` tuples.

        Nodes not listed explicitly are added in order of first appearance.
        """
        order = list(nodes) if nodes is not None else []
        known = set(order)

        def add(v):
            if v not in known:
                known.add(v)
                order.append(v)

        add(source)
        arc_objs = []
        for aid, tail, head, cap in arcs:
            add(tail)
            add(head)
            cap = parse_rational(cap) if isinstance(cap, str) else Fraction(cap)
            arc_objs.append(Arc(aid, tail, head, cap))
        add(sink)
        return cls(tuple(order), tuple(arc_objs), source, sink)

    @cached_property
    def arc(self) -> dict[str, Arc]:
        return {a.id: a for a in self.arcs}

    @cached_property
    def out_arcs(self) -> dict[str, tuple[Arc, ...]]:
        out: dict[str, list[Arc]] = {v: [] for v in self.nodes}
        for a in self.arcs:
            out[a.tail].append(a)
        return {v: tuple(lst) for v, lst in out.items()}

    @cached_property
    def in_arcs(self) -> dict[str, tuple[Arc, ...]]:
        inc: dict[str, list[Arc]] = {v: [] for v in self.nodes}
        for a in self.arcs:
            inc[a.head].append(a)
        return {v: tuple(lst) for v, lst in inc.items()}

    @cached_property
    def capacity(self) -> dict[str, Fraction]:
        return {a.id: a.capacity for a in self.arcs}

    @property
    def max_capacity(self) -> Fraction:
        return max((a.capacity for a in self.arcs), default=Fraction(1))

    def tail(self, arc_id: str) -> str:
        return self.arc[arc_id].tail

    def head(self, arc_id: str) -> str:
        return self.arc[arc_id].head

    def is_unit_capacity(self) -> bool:
        return all(a.capacity == 1 for a in self.arcs)

    def is_integral(self) -> bool:
        return all(a.capacity.denominator == 1 for a in self.arcs)

    def with_capacities(self, caps: Mapping[str, object]) -> Network:
        """Copy with some arc capacities replaced."""
        arcs = tuple(
            Arc(a.id, a.tail, a.head, Fraction(caps[a.id])) if a.id in caps else a
            for a in self.arcs
        )
        return Network(self.nodes, arcs, self.source, self.sink)

    def without_arcs(self, removed: Iterable[str]) -> Network:
        removed = set(removed)
        arcs = tuple(a for a in self.arcs if a.id not in removed)
        return Network(self.nodes, arcs, self.source, self.sink)


# -- file format -----------------------------------------------------------


def _lines(text: str | bytes) -> Iterator[tuple[int, list[str]]]:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def parse_network(text: str | bytes) -> Network:
    header = None
    nodes: list[str] = []
    node_set: set[str] = set()
    source = sink = None
    arcs: list[Arc] = []
    arc_ids: set[str] = set()
    for lineno, tok in _lines(text):
        kind = tok[0]
        if kind == "p":
            if header is not None:
                raise NetworkFormatError("duplicate header", lineno)
            if len(tok) != 4 or tok[1] != "rrf" or not all(_INT_RE.match(t) for t in tok[2:]):
                raise NetworkFormatError("expected 'p rrf <nodes> <arcs>'", lineno)
            header = (int(tok[2]), int(tok[3]), lineno)
        elif kind == "n":
            if len(tok) not in (2, 3):
                raise NetworkFormatError("expected 'n <id> [source|sink]'", lineno)
            v = tok[1]
            if v in node_set:
                raise NetworkFormatError(f"duplicate node id {v!r}", lineno)
            node_set.add(v)
            nodes.append(v)
            if len(tok) == 3:
                if tok[2] == "source":
                    if source is not None:
                        raise NetworkFormatError("more than one source", lineno)
                    source = v
                elif tok[2] == "sink":
                    if sink is not None:
                        raise NetworkFormatError("more than one sink", lineno)
                    sink = v
                else:
                    raise NetworkFormatError(f"unknown node role {tok[2]!r}", lineno)
        elif kind == "a":
            if len(tok) != 5:
                raise NetworkFormatError("expected 'a <id> <tail> <head> <capacity>'", lineno)
            aid, tail, head, cap_tok = tok[1:]
            if aid in arc_ids:
                raise NetworkFormatError(f"duplicate arc id {aid!r}", lineno)
            for v in (tail, head):
                if v not in node_set:
                    raise NetworkFormatError(f"unknown node {v!r}", lineno)
            try:
                cap = parse_rational(cap_tok)
            except ValueError as exc:
                raise NetworkFormatError(str(exc), lineno) from None
            if cap < 0:
                raise NetworkFormatError(f"negative capacity on arc {aid!r}", lineno)
            arc_ids.add(aid)
            arcs.append(Arc(aid, tail, head, cap))
        else:
            raise NetworkFormatError(f"unknown line type {kind!r}", lineno)
    if source is None:
        raise NetworkFormatError("missing source")
    if sink is None:
        raise NetworkFormatError("missing sink")
    if header is not None:
        n, m, lineno = header
        if n != len(nodes) or m != len(arcs):
            raise NetworkFormatError(
                f"header declares {n} nodes/{m} arcs, found {len(nodes)}/{len(arcs)}", lineno
            )
    try:
        return Network(tuple(nodes), tuple(arcs), source, sink)
    except ValueError as exc:
        raise NetworkFormatError(str(exc)) from None


def write_network(net: Network) -> str:
    out = [f"p rrf {len(net.nodes)} {len(net.arcs)}"]
    for v in net.nodes:
        role = " source" if v == net.source else " sink" if v == net.sink else ""
        out.append(f"n {v}{role}")
    for a in net.arcs:
        out.append(f"a {a.id} {a.tail} {a.head} {format_rational(a.capacity)}")
    return "\n".join(out) + "\n"


# -- graph queries ---------------------------------------------------------


def reachable(net: Network, start: str, removed: Iterable[str] = ()) -> set[str]:
    removed = removed if isinstance(removed, (set, frozenset)) else set(removed)
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for a in net.out_arcs[v]:
            if a.id not in removed and a.head not in seen:
                seen.add(a.head)
                queue.append(a.head)
    return seen


def coreachable(net: Network, target: str, removed: Iterable[str] = ()) -> set[str]:
    """Nodes from which ``target`` can be reached."""
    removed = removed if isinstance(removed, (set, frozenset)) else set(removed)
    seen = {target}
    queue = deque([target])
    while queue:
        v = queue.popleft()
        for a in net.in_arcs[v]:
            if a.id not in removed and a.tail not in seen:
                seen.add(a.tail)
                queue.append(a.tail)
    return seen


def out_cut(net: Network, side: Iterable[str], removed: Iterable[str] = ()) -> frozenset[str]:
    """Arc ids of delta^+(side), skipping removed arcs."""
    side = set(side)
    removed = set(removed)
    return frozenset(
        a.id for a in net.arcs if a.tail in side and a.head not in side and a.id not in removed
    )


def enumerate_simple_paths(
    net: Network,
    start: str,
    end: str,
    limit: int = DEFAULT_PATH_LIMIT,
    removed: Iterable[str] = (),
) -> list[ArcPath]:
    """All simple start-end paths, lexicographic by arc-id sequence.

    Raises PathLimitExceeded when more than ``limit`` paths exist.
    """
    removed = set(removed)
    if start == end:
        return [()]
    # prune to nodes that can still reach `end`; keeps the DFS from wandering
    alive = coreachable(net, end, removed)
    if start not in alive:
        return []
    succ = {
        v: sorted((a for a in net.out_arcs[v] if a.id not in removed and a.head in alive),
                  key=lambda a: a.id)
        for v in alive
    }
    paths: list[ArcPath] = []
    on_path = {start}
    stack: list[str] = []

    def dfs(v: str) -> None:
        for a in succ[v]:
            w = a.head
            if w in on_path:
                continue
            stack.append(a.id)
            if w == end:
                if len(paths) >= limit:
                    raise PathLimitExceeded(f"more than {limit} simple {start}-{end} paths")
                paths.append(tuple(stack))
            else:
                on_path.add(w)
                dfs(w)
                on_path.discard(w)
            stack.pop()

    dfs(start)
    return paths


def is_cut(net: Network, arcs: Iterable[str], start: str, end: str) -> bool:
    """True iff every start-end path meets ``arcs``."""
    if start == end:
        return False
    return end not in reachable(net, start, set(arcs))


def st_bridges(net: Network, removed: Iterable[str] = ()) -> frozenset[str]:
    """Arcs whose individual removal disconnects source from sink."""
    removed = set(removed)
    s, t = net.source, net.sink
    if t not in reachable(net, s, removed):
        return frozenset()
    # only arcs on some s-t path can be bridges
    fwd = reachable(net, s, removed)
    bwd = coreachable(net, t, removed)
    bridges = set()
    for a in net.arcs:
        if a.id in removed or a.tail not in fwd or a.head not in bwd:
            continue
        if t not in reachable(net, s, removed | {a.id}):
            bridges.add(a.id)
    return frozenset(bridges)


def check_path(net: Network, path: ArcPath, start: str, end: str) -> None:
    """Raise ValueError unless ``path`` is a simple start-end arc path."""
    if not path:
        raise ValueError("empty path")
    v = start
    visited = {v}
    for aid in path:
        if aid not in net.arc:
            raise ValueError(f"unknown arc {aid!r}")
        a = net.arc[aid]
        if a.tail != v:
            raise ValueError(f"arc {aid!r} does not continue the path at {v!r}")
        v = a.head
        if v in visited:
            raise ValueError(f"path revisits node {v!r}")
        visited.add(v)
    if v != end:
        raise ValueError(f"path ends at {v!r}, expected {end!r}")


def path_nodes(net: Network, path: ArcPath) -> list[str]:
    if not path:
        return []
    nodes = [net.arc[path[0]].tail]
    nodes.extend(net.arc[aid].head for aid in path)
    return nodes
