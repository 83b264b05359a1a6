"""JSON encodings of flows, verdicts and certificates.

Every rational is written as a ``"p/q"`` string (or an integer string), never
as a decimal.
"""

from __future__ import annotations

from fractions import Fraction

from .flows import (
    KRerouteVerdict,
    MultiRerouting,
    PathFlow,
    RerouteVerdict,
    ReroutingFlow,
    ViolatedCut,
)
from .graph import format_rational, parse_rational
from .rcut import DualSolution
from .unitcap import BadCutReport, UncrossCertificate


def q(v: Fraction) -> str:
    return format_rational(Fraction(v))


def entries_to_json(entries) -> list[dict]:
    return [{"value": q(v), "arcs": list(p)} for p, v in entries]


def flow_to_json(x: PathFlow) -> dict:
    return {"value": q(x.value), "paths": entries_to_json(x.entries)}


def flow_from_json(doc: dict) -> PathFlow:
    return PathFlow.from_pairs((tuple(e["arcs"]), parse_rational(str(e["value"]))) for e in doc["paths"])


def arc_values_to_json(values: dict[str, Fraction]) -> dict[str, str]:
    return {a: q(v) for a, v in sorted(values.items()) if v != 0}


def cut_to_json(cut: ViolatedCut) -> dict:
    return {
        "cut": sorted(cut.arcs),
        "reroutable": q(cut.slack),
        "source_side": sorted(cut.source_side),
    }


def rerouting_to_json(rr: ReroutingFlow) -> dict:
    return {"value": q(rr.value), "paths": entries_to_json(rr.entries)}


def verdict_to_json(verdict: RerouteVerdict) -> dict:
    per_arc = {}
    for a, out in sorted(verdict.per_arc.items()):
        if isinstance(out, ViolatedCut):
            per_arc[a] = {"ok": False, **cut_to_json(out)}
        else:
            per_arc[a] = {"ok": True, "rerouting": rerouting_to_json(out)}
    return {"ok": verdict.ok, "strict": verdict.strict, "per_arc": per_arc}


def k_verdict_to_json(verdict: KRerouteVerdict) -> dict:
    failures = []
    checked = 0
    for failed, out in sorted(verdict.per_set.items(), key=lambda kv: sorted(kv[0])):
        checked += 1
        if isinstance(out, ViolatedCut):
            failures.append({"failed": sorted(failed), **cut_to_json(out)})
    return {"ok": verdict.ok, "k": verdict.k, "strict": verdict.strict, "checked_sets": checked, "failures": failures}


def multi_rerouting_to_json(rr: MultiRerouting) -> dict:
    return {"failed": sorted(rr.failed), "flows": {a: entries_to_json(e) for a, e in sorted(rr.flows.items())}}


def dual_to_json(dual: DualSolution) -> dict:
    return {
        "y": [{"failing": f, "arc": a, "value": q(v)} for (f, a), v in sorted(dual.y.items())],
        "z": {a: q(v) for a, v in sorted(dual.z.items())},
    }


def bad_cut_to_json(rep: BadCutReport) -> dict:
    return {"S": sorted(rep.S), "C": sorted(rep.C), "bad": rep.bad}


def uncross_to_json(cert: UncrossCertificate) -> dict:
    return {
        "cut": bad_cut_to_json(cert.Cstar),
        "cycle_arcs": cert.cycle_arcs,
        "cycle_paths": [list(p) for p in cert.cycle_paths],
        "epsilon": q(cert.epsilon),
        "new_paths": [list(p) for p in cert.new_paths],
        "total_before": q(cert.total_before),
        "total_after": q(cert.total_after),
    }
