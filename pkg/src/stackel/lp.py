"""Exact linear programming.

A two-phase primal simplex with Bland's rule over an integer-preserving
tableau: every entry is an integer equal to the true (rational) entry times
the determinant of the current basis, so pivots need only exact integer
division. Results are exact rationals and fully deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .numeric import Fraction, format_fraction, to_fraction

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


class LpError(ValueError):
    """Malformed linear program."""


@dataclass
class Constraint:
    coeffs: dict[str, Fraction]
    relation: str
    rhs: Fraction
    name: str = ""


@dataclass
class LinearProgram:
    sense: str = "max"
    variables: list[str] = field(default_factory=list)
    bounds: dict[str, tuple] = field(default_factory=dict)
    objective: dict[str, Fraction] = field(default_factory=dict)
    constraints: list[Constraint] = field(default_factory=list)

    def add_variable(self, name: str, lo=0, hi=None) -> str:
        if name in self.bounds:
            raise LpError(f"duplicate variable {name!r}")
        self.variables.append(name)
        self.bounds[name] = (None if lo is None else to_fraction(lo),
                             None if hi is None else to_fraction(hi))
        return name

    def add_constraint(self, coeffs, relation: str, rhs, name: str = "") -> Constraint:
        clean: dict[str, Fraction] = {}
        for v, a in coeffs.items():
            a = to_fraction(a)
            if a:
                clean[v] = clean.get(v, Fraction(0)) + a
        con = Constraint(clean, relation, to_fraction(rhs), name or f"c{len(self.constraints)}")
        self.constraints.append(con)
        return con

    def set_objective(self, coeffs, sense: str = "max") -> None:
        self.sense = sense
        self.objective = {v: to_fraction(a) for v, a in coeffs.items() if a}

    def check(self) -> None:
        if self.sense not in ("max", "min"):
            raise LpError(f"sense must be 'max' or 'min', got {self.sense!r}")
        known = set(self.variables)
        for v in self.objective:
            if v not in known:
                raise LpError(f"objective references undeclared variable {v!r}")
        for con in self.constraints:
            if con.relation not in ("<=", "=", ">="):
                raise LpError(f"constraint {con.name}: bad relation {con.relation!r}")
            for v in con.coeffs:
                if v not in known:
                    raise LpError(f"constraint {con.name} references undeclared variable {v!r}")
        for v, (lo, hi) in self.bounds.items():
            if lo is not None and hi is not None and lo > hi:
                raise LpError(f"variable {v!r} has empty bounds [{lo}, {hi}]")

    def evaluate(self, values) -> Fraction:
        return sum((a * values[v] for v, a in self.objective.items()), Fraction(0))

    def is_feasible(self, values) -> bool:
        for v, (lo, hi) in self.bounds.items():
            if (lo is not None and values[v] < lo) or (hi is not None and values[v] > hi):
                return False
        for con in self.constraints:
            lhs = sum((a * values[v] for v, a in con.coeffs.items()), Fraction(0))
            if con.relation == "<=" and lhs > con.rhs:
                return False
            if con.relation == ">=" and lhs < con.rhs:
                return False
            if con.relation == "=" and lhs != con.rhs:
                return False
        return True


@dataclass(frozen=True)
class LpSolution:
    status: str
    values: dict
    objective_value: Fraction | None
    pivots: int = 0


def _lcm_den(values) -> int:
    out = 1
    for v in values:
        out = out * v.denominator // math.gcd(out, v.denominator)
    return out


class _Tableau:
    def __init__(self, rows, rhs, basis, ncols):
        self.T = [r + [b] for r, b in zip(rows, rhs)]
        self.basis = basis
        self.ncols = ncols
        self.d = 1
        self.obj = [0] * (ncols + 1)
        self.pivots = 0

    def pivot(self, r, c):
        T, d = self.T, self.d
        prow = T[r]
        piv = prow[c]
        for i, row in enumerate(T):
            if i == r:
                continue
            f = row[c]
            if f:
                T[i] = [(piv * x - f * y) // d for x, y in zip(row, prow)]
            else:
                T[i] = [(piv * x) // d for x in row]
        f = self.obj[c]
        self.obj = [(piv * x - f * y) // d for x, y in zip(self.obj, prow)]
        self.basis[r] = c
        self.d = piv
        if piv < 0:
            self.T = [[-x for x in row] for row in self.T]
            self.obj = [-x for x in self.obj]
            self.d = -piv
        self.pivots += 1

    def run(self, allowed) -> str:
        """Maximise the objective row with Bland's rule."""
        T = self.T
        rhs = self.ncols
        while True:
            enter = next((j for j in allowed if self.obj[j] > 0), None)
            if enter is None:
                return OPTIMAL
            best = None
            for i, row in enumerate(self.T):
                a = row[enter]
                if a > 0:
                    if best is None:
                        best = i
                    else:
                        lhs = row[rhs] * self.T[best][enter]
                        rhs_ = self.T[best][rhs] * a
                        if lhs < rhs_ or (lhs == rhs_ and self.basis[i] < self.basis[best]):
                            best = i
            if best is None:
                return UNBOUNDED
            self.pivot(best, enter)
            T = self.T


def solve_lp(lp: LinearProgram) -> LpSolution:
    """Solve exactly. Returns status optimal / infeasible / unbounded."""
    lp.check()
    names = lp.variables
    # x = lo + y, x = hi - y, or x = y+ - y-, with y >= 0
    cols: list[tuple[str, int]] = []  # (variable, sign) per structural column
    offset: dict[str, Fraction] = {}
    colmap: dict[str, list[tuple[int, int]]] = {}
    extra: list[tuple[dict[int, Fraction], Fraction]] = []  # y-space upper bounds
    for v in names:
        lo, hi = lp.bounds[v]
        if lo is not None:
            offset[v] = lo
            colmap[v] = [(len(cols), 1)]
            cols.append((v, 1))
            if hi is not None:
                extra.append(({colmap[v][0][0]: Fraction(1)}, hi - lo))
        elif hi is not None:
            offset[v] = hi
            colmap[v] = [(len(cols), -1)]
            cols.append((v, -1))
        else:
            offset[v] = Fraction(0)
            colmap[v] = [(len(cols), 1), (len(cols) + 1, -1)]
            cols.extend([(v, 1), (v, -1)])
    nstruct = len(cols)

    rows: list[tuple[dict[int, Fraction], str, Fraction]] = []
    for con in lp.constraints:
        coef: dict[int, Fraction] = {}
        b = con.rhs
        for v, a in con.coeffs.items():
            b -= a * offset[v]
            for j, s in colmap[v]:
                coef[j] = coef.get(j, Fraction(0)) + a * s
        rows.append((coef, con.relation, b))
    for coef, b in extra:
        rows.append((coef, "<=", b))

    # integer rows, slack/surplus columns, and a starting basis
    m = len(rows)
    int_rows: list[dict[int, int]] = []
    rhs: list[int] = []
    slack_of: list[int | None] = []
    nslack = 0
    for coef, rel, b in rows:
        scale = _lcm_den(list(coef.values()) + [b])
        r = {j: int(a * scale) for j, a in coef.items() if a}
        bb = int(b * scale)
        sign = 1
        if bb < 0 or (bb == 0 and rel == ">="):
            sign = -1
        r = {j: sign * a for j, a in r.items()}
        bb *= sign
        if rel == "=":
            slack_of.append(None)
        else:
            s = 1 if rel == "<=" else -1
            s *= sign
            r[nstruct + nslack] = s
            slack_of.append(nstruct + nslack if s == 1 else None)
            nslack += 1
        int_rows.append(r)
        rhs.append(bb)
    nart_start = nstruct + nslack
    art_rows = [i for i in range(m) if slack_of[i] is None]
    ncols = nart_start + len(art_rows)
    basis = []
    dense = []
    for i, r in enumerate(int_rows):
        row = [0] * ncols
        for j, a in r.items():
            row[j] = a
        if slack_of[i] is None:
            col = nart_start + art_rows.index(i)
            row[col] = 1
            basis.append(col)
        else:
            basis.append(slack_of[i])
        dense.append(row)
    tab = _Tableau(dense, rhs, basis, ncols)

    # phase 1: maximise -sum(artificials)
    if art_rows:
        obj = [0] * (ncols + 1)
        for i in art_rows:
            for j in range(nart_start):
                obj[j] += tab.T[i][j]
            obj[ncols] += tab.T[i][ncols]
        tab.obj = obj
        tab.run(range(ncols))
        # the rhs cell holds -d * (phase-1 objective)
        if tab.obj[ncols] > 0:
            return LpSolution(INFEASIBLE, {}, None, tab.pivots)
        # drive remaining artificials out, dropping redundant rows
        i = 0
        while i < len(tab.T):
            if tab.basis[i] >= nart_start:
                j = next((j for j in range(nart_start) if tab.T[i][j] != 0), None)
                if j is None:
                    del tab.T[i]
                    del tab.basis[i]
                    continue
                tab.pivot(i, j)
            i += 1

    # phase 2
    c_scale = _lcm_den(lp.objective.values()) if lp.objective else 1
    sgn = 1 if lp.sense == "max" else -1
    cvec = [0] * ncols
    for v, a in lp.objective.items():
        for j, s in colmap[v]:
            cvec[j] += sgn * int(a * c_scale) * s
    obj = [tab.d * cvec[j] for j in range(ncols)] + [0]
    for i, row in enumerate(tab.T):
        cb = cvec[tab.basis[i]]
        if cb:
            obj = [o - cb * x for o, x in zip(obj, row)]
    tab.obj = obj
    status = tab.run(range(nart_start))
    if status == UNBOUNDED:
        return LpSolution(UNBOUNDED, {}, None, tab.pivots)

    y = [Fraction(0)] * ncols
    for i, row in enumerate(tab.T):
        y[tab.basis[i]] = Fraction(row[ncols], tab.d)
    values = {}
    for v in names:
        val = offset[v]
        for j, s in colmap[v]:
            val += s * y[j]
        values[v] = val
    return LpSolution(OPTIMAL, values, lp.evaluate(values), tab.pivots)


def dump_lp(lp: LinearProgram) -> str:
    """Plain-text LP in a CPLEX-like layout; exact coefficients as ``p/q``."""
    def term(a, v, first):
        sign = "-" if a < 0 else ("" if first else "+")
        mag = abs(a)
        coef = "" if mag == 1 else format_fraction(mag) + " "
        return f"{sign} {coef}{v}".strip() if first else f"{sign} {coef}{v}"

    def expr(coeffs):
        if not coeffs:
            return "0"
        parts = [term(a, v, k == 0) for k, (v, a) in enumerate(coeffs.items())]
        return " ".join(parts)

    lines = ["Maximize" if lp.sense == "max" else "Minimize", f" obj: {expr(lp.objective)}",
             "Subject To"]
    for con in lp.constraints:
        rel = {"<=": "<=", ">=": ">=", "=": "="}[con.relation]
        lines.append(f" {con.name}: {expr(con.coeffs)} {rel} {format_fraction(con.rhs)}")
    lines.append("Bounds")
    for v in lp.variables:
        lo, hi = lp.bounds[v]
        lo_s = "-inf" if lo is None else format_fraction(lo)
        hi_s = "+inf" if hi is None else format_fraction(hi)
        lines.append(f" {lo_s} <= {v} <= {hi_s}")
    lines.append("End")
    return "\n".join(lines) + "\n"
