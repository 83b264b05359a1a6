"""Exact linear programming over the rationals.

Two solvers live here:

* ``simplex_exact`` -- dense two-phase primal simplex with Bland's rule in
  Fraction arithmetic. Always exact, always terminates, slow beyond a few
  hundred rows.
* ``solve_lp`` -- the default. Runs HiGHS in floating point, rounds primal
  and dual solutions to nearby rationals and accepts them only when they
  pass an exact optimality certificate (primal feasibility, dual
  feasibility, equal objectives). Anything it cannot certify is handed to
  ``simplex_exact``.

All variables are nonnegative.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import csr_matrix

log = logging.getLogger(__name__)

LE, EQ, GE = "<=", "=", ">="
_SENSES = (LE, EQ, GE)

OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"

# denominators tried, in order, when rounding a floating point solution
_DENOMINATORS = (1, 12, 840, 10**4, 10**6)


def _num(v):
    if isinstance(v, int):
        return v
    if isinstance(v, Fraction):
        return v if v.denominator != 1 else v.numerator
    if isinstance(v, float):
        raise TypeError("floats are not accepted as LP data; use Fraction")
    return Fraction(v)


@dataclass
class Constraint:
    coeffs: dict[str, Fraction]
    sense: str
    rhs: Fraction
    name: str | None = None


@dataclass
class LinearProgram:
    sense: str = "max"
    variables: list[str] = field(default_factory=list)
    constraints: list[Constraint] = field(default_factory=list)
    objective: dict[str, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        if self.sense not in ("max", "min"):
            raise ValueError("sense must be 'max' or 'min'")
        self._index = {v: i for i, v in enumerate(self.variables)}

    def add_variable(self, name: str) -> str:
        if name in self._index:
            raise ValueError(f"duplicate variable {name!r}")
        self._index[name] = len(self.variables)
        self.variables.append(name)
        return name

    def has_variable(self, name: str) -> bool:
        return name in self._index

    def add_constraint(self, coeffs: Mapping[str, object], sense: str, rhs, name=None):
        if sense not in _SENSES:
            raise ValueError(f"unknown relation {sense!r}")
        row = {}
        for v, a in coeffs.items():
            if v not in self._index:
                raise KeyError(f"undeclared variable {v!r}")
            a = _num(a)
            if a != 0:
                row[v] = row.get(v, 0) + a
        self.constraints.append(Constraint(row, sense, _num(rhs), name))

    def set_objective(self, coeffs: Mapping[str, object], sense: str | None = None):
        if sense is not None:
            if sense not in ("max", "min"):
                raise ValueError("sense must be 'max' or 'min'")
            self.sense = sense
        obj = {}
        for v, a in coeffs.items():
            if v not in self._index:
                raise KeyError(f"undeclared variable {v!r}")
            a = _num(a)
            if a != 0:
                obj[v] = obj.get(v, 0) + a
        self.objective = obj

    def index(self, name: str) -> int:
        return self._index[name]

    def evaluate(self, assignment: Mapping[str, Fraction]) -> Fraction:
        return sum((a * assignment.get(v, 0) for v, a in self.objective.items()), Fraction(0))

    def is_feasible(self, assignment: Mapping[str, Fraction]) -> bool:
        if any(assignment.get(v, 0) < 0 for v in self.variables):
            return False
        for con in self.constraints:
            lhs = sum((a * assignment.get(v, 0) for v, a in con.coeffs.items()), 0)
            if con.sense == LE and lhs > con.rhs:
                return False
            if con.sense == GE and lhs < con.rhs:
                return False
            if con.sense == EQ and lhs != con.rhs:
                return False
        return True

    def to_text(self) -> str:
        """Human-readable listing, one column per variable (debug only)."""
        lines = [f"{self.sense} " + _fmt_row(self.objective)]
        lines.append("subject to")
        for i, con in enumerate(self.constraints):
            label = con.name or f"c{i}"
            lines.append(f"  {label}: {_fmt_row(con.coeffs)} {con.sense} {con.rhs}")
        lines.append("variables")
        for j, v in enumerate(self.variables):
            lines.append(f"  [{j}] {v} >= 0")
        return "\n".join(lines) + "\n"


def _fmt_row(row) -> str:
    if not row:
        return "0"
    return " ".join(f"{'+' if a >= 0 else '-'} {abs(a)}*{v}" for v, a in row.items())


@dataclass
class LpOutcome:
    status: str
    value: Fraction | None = None
    assignment: dict[str, Fraction] = field(default_factory=dict)
    method: str = ""


def dual_lp(lp: LinearProgram) -> tuple[LinearProgram, Fraction]:
    """Dual of ``lp`` written with nonnegative variables only.

    Returns ``(dual, sign)`` such that ``sign * dual_optimum`` equals the
    primal optimum. Row ``i`` contributes variables ``p{i}`` / ``n{i}``
    (positive and negative part of its multiplier).
    """
    # normalise the primal to: max c.x, rows (<= or =), x >= 0
    flip = 1 if lp.sense == "max" else -1
    dual = LinearProgram(sense="min")
    cols: dict[str, dict[str, Fraction]] = {v: {} for v in lp.variables}
    objective = {}
    for i, con in enumerate(lp.constraints):
        mult = -1 if con.sense == GE else 1
        parts = [(f"p{i}", 1)] if con.sense != EQ else [(f"p{i}", 1), (f"n{i}", -1)]
        for name, sgn in parts:
            dual.add_variable(name)
            objective[name] = sgn * mult * con.rhs
            for v, a in con.coeffs.items():
                cols[v][name] = sgn * mult * a
    for v in lp.variables:
        dual.add_constraint(cols[v], GE, flip * lp.objective.get(v, 0))
    dual.set_objective(objective)
    return dual, Fraction(flip)


# -- exact simplex ---------------------------------------------------------


def simplex_exact(lp: LinearProgram) -> LpOutcome:
    """Two-phase primal simplex, Bland's rule, Fraction arithmetic."""
    n = len(lp.variables)
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    n_slack = sum(1 for c in lp.constraints if c.sense != EQ)
    width = n + n_slack
    slack = n
    for con in lp.constraints:
        row = [Fraction(0)] * width
        for v, a in con.coeffs.items():
            row[lp.index(v)] = Fraction(a)
        if con.sense == LE:
            row[slack] = Fraction(1)
            slack += 1
        elif con.sense == GE:
            row[slack] = Fraction(-1)
            slack += 1
        b = Fraction(con.rhs)
        if b < 0:
            row = [-x for x in row]
            b = -b
        rows.append(row)
        rhs.append(b)
    m = len(rows)
    # phase 1: one artificial per row
    total = width + m
    tab = [rows[i] + [Fraction(int(k == i)) for k in range(m)] + [rhs[i]] for i in range(m)]
    basis = [width + i for i in range(m)]

    def run(obj: list[Fraction], allowed: int) -> bool:
        # obj is the reduced-cost row for maximisation, kept in canonical form
        while True:
            enter = next((j for j in range(allowed) if obj[j] > 0), None)
            if enter is None:
                return True
            best = None
            for i in range(m):
                a = tab[i][enter]
                if a > 0:
                    ratio = tab[i][-1] / a
                    if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                        best = (ratio, i)
            if best is None:
                return False
            pivot(best[1], enter, obj)

    def pivot(r: int, c: int, obj: list[Fraction]):
        prow = tab[r]
        p = prow[c]
        if p != 1:
            prow = tab[r] = [x / p for x in prow]
        for i in range(m):
            if i != r:
                f = tab[i][c]
                if f != 0:
                    tab[i] = [x - f * y for x, y in zip(tab[i], prow)]
        f = obj[c]
        if f != 0:
            obj[:] = [x - f * y for x, y in zip(obj, prow)]
        basis[r] = c

    # maximise -sum(artificials): reduced costs = sum of rows on original columns
    obj1 = [Fraction(0)] * (total + 1)
    for i in range(m):
        for j in range(width):
            obj1[j] += tab[i][j]
        obj1[-1] += tab[i][-1]
    run(obj1, width)
    if obj1[-1] != 0:
        return LpOutcome(INFEASIBLE, method="simplex")
    # drive artificials out of the basis; drop redundant rows
    i = 0
    while i < m:
        if basis[i] >= width:
            col = next((j for j in range(width) if tab[i][j] != 0), None)
            if col is None:
                del tab[i]
                del basis[i]
                m -= 1
                continue
            pivot(i, col, obj1)
        i += 1
    for i in range(m):
        tab[i] = tab[i][:width] + [tab[i][-1]]
    # phase 2
    sign = 1 if lp.sense == "max" else -1
    c = [Fraction(0)] * (width + 1)
    for v, a in lp.objective.items():
        c[lp.index(v)] = Fraction(sign * a)
    obj2 = c[:]
    for i in range(m):
        f = c[basis[i]]
        if f != 0:
            obj2 = [x - f * y for x, y in zip(obj2, tab[i])]
    if not run(obj2, width):
        return LpOutcome(UNBOUNDED, method="simplex")
    values = [Fraction(0)] * width
    for i in range(m):
        values[basis[i]] = tab[i][-1]
    assignment = {v: values[j] for j, v in enumerate(lp.variables)}
    return LpOutcome(OPTIMAL, lp.evaluate(assignment), assignment, method="simplex")


# -- floating point solve with exact certificate ---------------------------


class _Normalised:
    """lp rewritten as: min c.x, A_ub x <= b_ub, A_eq x = b_eq, x >= 0."""

    def __init__(self, lp: LinearProgram):
        self.n = len(lp.variables)
        sign = -1 if lp.sense == "max" else 1
        self.c = [0] * self.n
        for v, a in lp.objective.items():
            self.c[lp.index(v)] = sign * a
        self.ub: list[tuple[list[tuple[int, object]], object]] = []
        self.eq: list[tuple[list[tuple[int, object]], object]] = []
        for con in lp.constraints:
            mult = -1 if con.sense == GE else 1
            row = [(lp.index(v), mult * a) for v, a in con.coeffs.items()]
            (self.eq if con.sense == EQ else self.ub).append((row, mult * con.rhs))

    def matrices(self):
        def build(rows):
            data, ri, ci = [], [], []
            for i, (row, _) in enumerate(rows):
                for j, a in row:
                    ri.append(i)
                    ci.append(j)
                    data.append(float(a))
            mat = csr_matrix((data, (ri, ci)), shape=(len(rows), self.n))
            return mat, np.array([float(b) for _, b in rows])

        return build(self.ub), build(self.eq)

    def primal_feasible(self, x: list) -> bool:
        if any(v < 0 for v in x):
            return False
        for row, b in self.ub:
            if sum(a * x[j] for j, a in row if x[j]) > b:
                return False
        for row, b in self.eq:
            if sum(a * x[j] for j, a in row if x[j]) != b:
                return False
        return True

    def dual_feasible(self, y_ub: list, y_eq: list) -> bool:
        if any(v > 0 for v in y_ub):
            return False
        d = list(self.c)
        for rows, ys in ((self.ub, y_ub), (self.eq, y_eq)):
            for (row, _), y in zip(rows, ys):
                if y:
                    for j, a in row:
                        d[j] -= y * a
        return all(v >= 0 for v in d)

    def primal_value(self, x):
        return sum(cj * xj for cj, xj in zip(self.c, x) if cj and xj)

    def dual_value(self, y_ub, y_eq):
        return sum(y * b for (_, b), y in zip(self.ub, y_ub) if y) + sum(
            y * b for (_, b), y in zip(self.eq, y_eq) if y
        )


def _round(values, den: int) -> list:
    out = []
    for v in values:
        r = round(v)
        if abs(v - r) < 1e-9:
            out.append(int(r))
        else:
            out.append(Fraction(float(v)).limit_denominator(den))
    return out


def _certified_highs(lp: LinearProgram) -> LpOutcome | None:
    norm = _Normalised(lp)
    if norm.n == 0:
        return None
    (a_ub, b_ub), (a_eq, b_eq) = norm.matrices()
    res = linprog(
        np.array([float(c) for c in norm.c]),
        A_ub=a_ub if a_ub.shape[0] else None,
        b_ub=b_ub if a_ub.shape[0] else None,
        A_eq=a_eq if a_eq.shape[0] else None,
        b_eq=b_eq if a_eq.shape[0] else None,
        bounds=(0, None),
        method="highs-ds",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    if res.status != 0:
        return None
    y_ub_f = res.ineqlin.marginals if a_ub.shape[0] else []
    y_eq_f = res.eqlin.marginals if a_eq.shape[0] else []
    primal, dual = [], []
    for den in _DENOMINATORS:
        x = _round(res.x, den)
        if x not in primal and norm.primal_feasible(x):
            primal.append(x)
        y = (_round(y_ub_f, den), _round(y_eq_f, den))
        if y not in dual and norm.dual_feasible(*y):
            dual.append(y)
        for x in primal:
            px = norm.primal_value(x)
            for y in dual:
                if px == norm.dual_value(*y):
                    assignment = {v: Fraction(x[j]) for j, v in enumerate(lp.variables)}
                    return LpOutcome(OPTIMAL, lp.evaluate(assignment), assignment, method="highs+certificate")
    return None


def solve_lp(lp: LinearProgram, method: str = "auto") -> LpOutcome:
    """Exact optimum of ``lp``.

    ``method`` is ``"auto"`` (certified HiGHS, simplex fallback),
    ``"simplex"`` (exact simplex only) or ``"highs"`` (certified HiGHS only;
    raises if no certificate is found).
    """
    if method == "simplex":
        return simplex_exact(lp)
    if method not in ("auto", "highs"):
        raise ValueError(f"unknown method {method!r}")
    if not lp.variables:
        return simplex_exact(lp)
    out = _certified_highs(lp)
    if out is not None:
        return out
    if method == "highs":
        raise RuntimeError("could not certify the floating point LP solution")
    log.info("no certificate for LP with %d variables; falling back to exact simplex", len(lp.variables))
    return simplex_exact(lp)
