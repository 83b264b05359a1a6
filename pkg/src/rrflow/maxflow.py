"""Exact maximum flow / minimum cut (Edmonds-Karp over Fractions)."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .graph import Network, out_cut

ZERO = Fraction(0)


@dataclass(frozen=True)
class MaxFlowResult:
    value: Fraction
    arc_flow: dict[str, Fraction]
    min_cut_source_side: frozenset[str]


def _capacities(net: Network, cap: Mapping[str, Fraction] | None, removed: set[str]):
    caps = {}
    for a in net.arcs:
        if a.id in removed:
            continue
        c = net.capacity[a.id] if cap is None or a.id not in cap else Fraction(cap[a.id])
        if c < 0:
            raise ValueError(f"negative capacity on arc {a.id!r}")
        caps[a.id] = c
    return caps


def max_flow(
    net: Network,
    cap: Mapping[str, Fraction] | None = None,
    start: str | None = None,
    end: str | None = None,
    removed: Iterable[str] = (),
) -> MaxFlowResult:
    """Maximum start-end flow under ``cap`` (defaults to net capacities).

    Arcs in ``removed`` are treated as absent. The returned source side is the
    set of nodes reachable from ``start`` in the final residual graph.
    """
    start = net.source if start is None else start
    end = net.sink if end is None else end
    if start == end:
        raise ValueError("start and end must differ")
    removed = set(removed)
    caps = _capacities(net, cap, removed)
    flow = {aid: ZERO for aid in caps}
    value = ZERO

    def bfs():
        pred: dict[str, tuple[str, int]] = {start: None}
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for a in net.out_arcs[v]:
                if a.id in caps and a.head not in pred and flow[a.id] < caps[a.id]:
                    pred[a.head] = (a.id, 1)
                    if a.head == end:
                        return pred
                    queue.append(a.head)
            for a in net.in_arcs[v]:
                if a.id in caps and a.tail not in pred and flow[a.id] > 0:
                    pred[a.tail] = (a.id, -1)
                    queue.append(a.tail)
        return pred

    while True:
        pred = bfs()
        if end not in pred:
            break
        # bottleneck along the augmenting path
        delta = None
        v = end
        steps = []
        while v != start:
            aid, d = pred[v]
            a = net.arc[aid]
            res = caps[aid] - flow[aid] if d == 1 else flow[aid]
            delta = res if delta is None else min(delta, res)
            steps.append((aid, d))
            v = a.tail if d == 1 else a.head
        for aid, d in steps:
            flow[aid] += delta * d
        value += delta

    side = frozenset(pred)
    return MaxFlowResult(value, flow, side)


def min_cut(
    net: Network,
    cap: Mapping[str, Fraction] | None = None,
    start: str | None = None,
    end: str | None = None,
    removed: Iterable[str] = (),
) -> tuple[frozenset[str], Fraction]:
    """Canonical minimum cut: delta^+ of the residual-reachable side."""
    removed = set(removed)
    res = max_flow(net, cap, start, end, removed)
    arcs = out_cut(net, res.min_cut_source_side, removed)
    caps = _capacities(net, cap, removed)
    total = sum((caps[a] for a in arcs), ZERO)
    assert total == res.value, "max-flow/min-cut mismatch"
    return arcs, total
