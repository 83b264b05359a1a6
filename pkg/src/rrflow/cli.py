"""Command-line front end. Each subcommand loads its inputs, calls one library
function and prints the result as JSON (``--json``) or short text."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

from . import jsonio
from .flows import (
    BudgetExceeded,
    InvalidFlowError,
    PathFlow,
    parse_flow,
    verify_k_reroutable,
    verify_reroutable,
    write_flow,
)
from .graph import NetworkFormatError, Network, PathLimitExceeded, parse_network, parse_rational, write_network
from .instances import (
    gen_crossing,
    gen_fig2,
    gen_fig3,
    gen_random,
    normalize_fp,
    parse_fp,
    reduce_fp_cap12,
    reduce_fp_integral,
    reduce_fp_k2,
    solve_fp_bruteforce,
)
from .oracle import (
    OracleBudget,
    oracle_integral_unit_flow,
    oracle_max_k_rf,
    oracle_max_rf,
    oracle_max_srf_paths,
    oracle_min_rcut,
    oracle_strict_check_cuts,
)
from .rcut import (
    InvalidRCutError,
    approx_min_rcut_details,
    check_dual_feasible,
    half_integral_approx_flow,
    parse_rcut,
    rcut_capacity,
    rcut_to_dual,
    rcut_to_json,
    write_rcut,
)
from .srf import approx_max_rf, solve_max_srf
from .unitcap import make_strict, unit_demand_half_integral

EXIT_OK, EXIT_NEGATIVE, EXIT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class CommandResult:
    status: str  # "ok", "negative" or "error"
    payload: dict = field(default_factory=dict)
    text: str = ""
    as_json: bool = False

    @property
    def exit_code(self) -> int:
        return {"ok": EXIT_OK, "negative": EXIT_NEGATIVE}.get(self.status, EXIT_ERROR)


def _ok(payload: dict, text: str = "") -> CommandResult:
    return CommandResult("ok", payload, text)


def _decide(flag: bool, payload: dict, text: str = "") -> CommandResult:
    return CommandResult("ok" if flag else "negative", payload, text)


# -- input helpers ---------------------------------------------------------


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None


def _load(path: str, parser):
    text = _read(path)
    try:
        return parser(text)
    except (NetworkFormatError, ValueError, KeyError) as exc:
        raise UsageError(f"{path}: {exc}") from None


def _network(args) -> Network:
    return _load(args.network, parse_network)


def _flow(args) -> PathFlow:
    if not args.flow:
        raise UsageError("--flow FILE is required")

    def parse(text):
        if text.lstrip().startswith("{"):
            return jsonio.flow_from_json(json.loads(text))
        return parse_flow(text)

    return _load(args.flow, parse)


def _budget(args) -> OracleBudget:
    if args.budget is None:
        return OracleBudget()
    return OracleBudget(max_paths=args.budget, max_failure_sets=args.budget)


def _flow_text(x: PathFlow) -> str:
    return f"value {jsonio.q(x.value)}\n" + write_flow(x)


# -- subcommands -----------------------------------------------------------


def cmd_solve_srf(args) -> CommandResult:
    net = _network(args)
    sol = solve_max_srf(net)
    payload = {
        "value": jsonio.q(sol.value),
        "flow": jsonio.flow_to_json(sol.nominal),
        "arc_flow": jsonio.arc_values_to_json(sol.arc_flow),
    }
    if args.emit_reroutings:
        os.makedirs(args.emit_reroutings, exist_ok=True)
        for f, rr in sol.reroutings.items():
            path = os.path.join(args.emit_reroutings, f"{f}.json")
            with open(path, "w", encoding="utf-8") as fh:
                json.dump({"failing_arc": f, **jsonio.rerouting_to_json(rr)}, fh, indent=2)
        payload["reroutings_dir"] = args.emit_reroutings
    return _ok(payload, _flow_text(sol.nominal))


def cmd_approx_rf(args) -> CommandResult:
    x, value, guarantee = approx_max_rf(_network(args))
    return _ok(
        {"value": jsonio.q(value), "flow": jsonio.flow_to_json(x), "guarantee": guarantee},
        _flow_text(x) + f"guarantee {guarantee}\n",
    )


def cmd_verify(args) -> CommandResult:
    net, x = _network(args), _flow(args)
    verdict = verify_reroutable(net, x, strict=args.strict)
    lines = [f"ok {str(verdict.ok).lower()}"]
    for a, out in sorted(verdict.failures().items()):
        lines.append(f"fail {a} reroutable {jsonio.q(out.slack)} cut {' '.join(sorted(out.arcs))}")
    return _decide(verdict.ok, jsonio.verdict_to_json(verdict), "\n".join(lines) + "\n")


def cmd_verify_k(args) -> CommandResult:
    net, x = _network(args), _flow(args)
    kwargs = {} if args.budget is None else {"max_failure_sets": args.budget}
    verdict = verify_k_reroutable(net, x, args.k, strict=args.strict, **kwargs)
    doc = jsonio.k_verdict_to_json(verdict)
    lines = [f"ok {str(verdict.ok).lower()}"]
    for f in doc["failures"]:
        lines.append(f"fail {' '.join(f['failed'])} cut {' '.join(f['cut'])}")
    return _decide(verdict.ok, doc, "\n".join(lines) + "\n")


def cmd_rcut_capacity(args) -> CommandResult:
    net = _network(args)
    rc = _load(args.rcut, parse_rcut)
    cap = rcut_capacity(net, rc)
    return _ok(rcut_to_json(rc, cap), f"capacity {jsonio.q(cap)}\n")


def cmd_rcut_approx(args) -> CommandResult:
    out = approx_min_rcut_details(_network(args))
    payload = rcut_to_json(out.rcut, out.capacity)
    payload["bound"] = jsonio.q(out.bound)
    payload["witness"] = jsonio.flow_to_json(out.witness)
    text = write_rcut(out.rcut) + f"capacity {jsonio.q(out.capacity)}\nwitness {jsonio.q(out.witness.value)}\n"
    return _ok(payload, text)


def cmd_rcut_dual(args) -> CommandResult:
    net = _network(args)
    rc = _load(args.rcut, parse_rcut)
    dual = rcut_to_dual(net, rc)
    feasible = check_dual_feasible(net, dual)
    payload = jsonio.dual_to_json(dual)
    payload["objective"] = jsonio.q(dual.objective(net))
    payload["capacity"] = jsonio.q(rcut_capacity(net, rc))
    payload["feasible"] = feasible
    text = f"objective {payload['objective']}\nfeasible {str(feasible).lower()}\n"
    return _decide(feasible, payload, text)


def cmd_unit_demand(args) -> CommandResult:
    out = unit_demand_half_integral(_network(args))
    payload = {"feasible": out.feasible, "A0": sorted(out.A0), "A1": sorted(out.A1)}
    if out.feasible:
        payload["flow"] = jsonio.flow_to_json(out.flow)
        return _ok(payload, _flow_text(out.flow))
    return _decide(False, payload, f"infeasible A0 {' '.join(sorted(out.A0))}\n")


def cmd_uncross(args) -> CommandResult:
    net, x = _network(args), _flow(args)
    trace: list = []
    y = make_strict(net, x, trace=trace)
    payload = {"flow": jsonio.flow_to_json(y), "steps": len(trace)}
    text = _flow_text(y)
    if args.trace:
        payload["trace"] = [jsonio.uncross_to_json(c) for c in trace]
        for i, c in enumerate(trace, start=1):
            text += f"step {i} cut {' '.join(sorted(c.Cstar.C))} epsilon {jsonio.q(c.epsilon)}"
            text += f" total {jsonio.q(c.total_before)} -> {jsonio.q(c.total_after)}\n"
    return _ok(payload, text)


def cmd_half_approx(args) -> CommandResult:
    x = half_integral_approx_flow(_network(args))
    return _ok({"value": jsonio.q(x.value), "flow": jsonio.flow_to_json(x)}, _flow_text(x))


def cmd_oracle(args) -> CommandResult:
    net, budget = _network(args), _budget(args)
    problem = args.problem
    if problem in ("rf", "srf", "k-rf"):
        if problem == "rf":
            value, x = oracle_max_rf(net, budget)
        elif problem == "srf":
            value, x = oracle_max_srf_paths(net, budget)
        else:
            value, x = oracle_max_k_rf(net, args.k, budget, strict=args.strict)
        return _ok({"value": jsonio.q(value), "flow": jsonio.flow_to_json(x)}, _flow_text(x))
    if problem == "min-rcut":
        rc, value = oracle_min_rcut(net, budget)
        return _ok(rcut_to_json(rc, value), write_rcut(rc) + f"capacity {jsonio.q(value)}\n")
    if problem == "integral":
        path = oracle_integral_unit_flow(net, budget)
        if path is None:
            return _decide(False, {"path": None}, "none\n")
        return _ok({"path": list(path)}, " ".join(path) + "\n")
    if problem == "strict-check":
        ok = oracle_strict_check_cuts(net, _flow(args), budget)
        return _decide(ok, {"ok": ok}, f"ok {str(ok).lower()}\n")
    raise UsageError(f"unknown oracle problem {problem}")


def cmd_gen(args) -> CommandResult:
    kind = args.kind
    if kind == "fig2":
        net = gen_fig2(parse_rational(args.a1_capacity))
    elif kind == "fig3":
        net = gen_fig3(args.k)
    elif kind == "random":
        caps = [parse_rational(c) for c in args.caps.split(",")]
        net = gen_random(args.nodes, args.arcs, caps, args.seed)
    elif kind == "crossing":
        net = gen_crossing(args.k, args.seed)
    else:
        if not args.input:
            raise UsageError(f"gen {kind} needs a forbidden-pairs input file")
        inst = _load(args.input, parse_fp)
        reduce = {"reduce-cap12": reduce_fp_cap12, "reduce-integral": reduce_fp_integral, "reduce-k2": reduce_fp_k2}
        net = reduce[kind](normalize_fp(inst))
    text = write_network(net)
    payload = {"nodes": len(net.nodes), "arcs": len(net.arcs)}
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise UsageError(f"{args.output}: {exc.strerror}") from None
        payload["path"] = args.output
        return _ok(payload, f"wrote {args.output}\n")
    payload["instance"] = text
    return _ok(payload, text)


def cmd_fp_solve(args) -> CommandResult:
    inst = _load(args.instance, parse_fp)
    path = solve_fp_bruteforce(inst)
    if path is None:
        return _decide(False, {"path": None}, "none\n")
    return _ok({"path": list(path)}, " ".join(path) + "\n")


# -- argument parsing ------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rrflow", description="Reroutable flows under single arc failures.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the JSON payload")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_, network=True, flow=False):
        p = sub.add_parser(name, parents=[common], help=help_)
        if network:
            p.add_argument("network", help="instance file")
        if flow:
            p.add_argument("--flow", help="path flow file (text or JSON)")
        p.set_defaults(func=func)
        return p

    p = add("solve-srf", cmd_solve_srf, "maximum strictly reroutable flow")
    p.add_argument("--emit-reroutings", metavar="DIR", help="write one rerouting per arc into DIR")
    add("approx-rf", cmd_approx_rf, "reroutable flow within factor 2 of the maximum")
    p = add("verify", cmd_verify, "check (strict) reroutability of a flow", flow=True)
    p.add_argument("--strict", action="store_true")
    p = add("verify-k", cmd_verify_k, "check reroutability under up to k failures", flow=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--strict", action="store_true")
    p.add_argument("--budget", type=int, help="maximum number of failure sets")
    p = add("rcut-capacity", cmd_rcut_capacity, "capacity of an R-cut")
    p.add_argument("rcut", help="R-cut file")
    add("rcut-approx", cmd_rcut_approx, "R-cut within factor 2 of the minimum")
    p = add("rcut-dual", cmd_rcut_dual, "dual solution of an R-cut")
    p.add_argument("rcut", help="R-cut file")
    add("unit-demand", cmd_unit_demand, "half-integral unit flow on a unit-capacity network")
    p = add("uncross", cmd_uncross, "turn a reroutable unit-capacity flow into a strict one", flow=True)
    p.add_argument("--trace", action="store_true", help="report every uncrossing step")
    add("half-approx", cmd_half_approx, "half-integral strictly reroutable 2-approximation")
    p = sub.add_parser("oracle", parents=[common], help="brute-force reference solvers for small instances")
    p.add_argument("problem", choices=["rf", "srf", "k-rf", "min-rcut", "integral", "strict-check"])
    p.add_argument("network", help="instance file")
    p.add_argument("--flow", help="path flow file for strict-check")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--strict", action="store_true")
    p.add_argument("--budget", type=int, help="maximum number of enumerated paths or failure sets")
    p.set_defaults(func=cmd_oracle)
    p = sub.add_parser("gen", parents=[common], help="write a generated instance")
    p.add_argument("kind", choices=["fig2", "fig3", "random", "crossing", "reduce-cap12", "reduce-integral", "reduce-k2"])
    p.add_argument("input", nargs="?", help="forbidden-pairs file for the reductions")
    p.add_argument("-o", "--output", help="output file (default: stdout)")
    p.add_argument("--a1-capacity", default="1")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--nodes", type=int, default=6)
    p.add_argument("--arcs", type=int, default=10)
    p.add_argument("--caps", default="1,2", help="comma-separated capacity choices")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen)
    p = sub.add_parser("fp-solve", parents=[common], help="brute-force forbidden-pairs path")
    p.add_argument("instance", help="forbidden-pairs file")
    p.set_defaults(func=cmd_fp_solve)
    return parser


def run(argv: list[str] | None = None) -> CommandResult:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse already printed usage or help
        return CommandResult("ok" if exc.code == 0 else "error", {"error": "usage"})
    try:
        result = args.func(args)
    except (UsageError, InvalidFlowError, InvalidRCutError, BudgetExceeded, PathLimitExceeded, ValueError) as exc:
        return CommandResult("error", {"error": str(exc)})
    result.as_json = args.json
    return result


def main(argv: list[str] | None = None) -> int:
    result = run(argv)
    if result.status == "error":
        if "error" in result.payload and result.payload["error"] != "usage":
            print(f"rrflow: error: {result.payload['error']}", file=sys.stderr)
        return result.exit_code
    if result.as_json:
        print(json.dumps({"status": result.status, **result.payload}, indent=2))
    else:
        sys.stdout.write(result.text)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
