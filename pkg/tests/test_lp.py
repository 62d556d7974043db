from fractions import Fraction
import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from stackel.lp import INFEASIBLE, OPTIMAL, UNBOUNDED, LinearProgram, LpError, dump_lp, solve_lp


def solve_square(rows, rhs):
    """Exact Gaussian elimination; None when singular."""
    n = len(rows)
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col] / m[col][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[col])]
    return [m[i][n] / m[i][i] for i in range(n)]


def vertex_optimum(n, rows, box):
    """Best objective over basic feasible points of {A x <= b, 0 <= x <= box}."""
    cons = [(r, b) for r, b in rows]
    cons += [([Fraction(-1) if j == i else Fraction(0) for j in range(n)], Fraction(0)) for i in range(n)]
    cons += [([Fraction(1) if j == i else Fraction(0) for j in range(n)], Fraction(box)) for i in range(n)]
    best = None
    for pick in itertools.combinations(range(len(cons)), n):
        x = solve_square([cons[i][0] for i in pick], [cons[i][1] for i in pick])
        if x is None or any(sum(a * v for a, v in zip(r, x)) > b for r, b in cons):
            continue
        yield x


def test_trivial_optimum():
    lp = LinearProgram()
    lp.add_variable("x")
    lp.add_constraint({"x": 1}, "<=", 1)
    lp.set_objective({"x": 1})
    sol = solve_lp(lp)
    assert sol.status == OPTIMAL and sol.values["x"] == 1


def test_trivial_infeasible():
    lp = LinearProgram()
    lp.add_variable("x")
    lp.add_constraint({"x": 1}, "<=", -1)
    lp.set_objective({"x": 1})
    assert solve_lp(lp).status == INFEASIBLE


def test_unbounded():
    lp = LinearProgram()
    lp.add_variable("x")
    lp.add_variable("y")
    lp.add_constraint({"x": 1, "y": -1}, "<=", 1)
    lp.set_objective({"x": 1})
    assert solve_lp(lp).status == UNBOUNDED


def test_free_and_bounded_variables():
    lp = LinearProgram()
    lp.add_variable("x", None, None)
    lp.add_variable("y", -3, 2)
    lp.add_constraint({"x": 1, "y": 1}, "=", Fraction(1, 2))
    lp.add_constraint({"x": 1}, ">=", -5)
    lp.set_objective({"x": 1, "y": 2}, "min")
    sol = solve_lp(lp)
    assert sol.status == OPTIMAL
    assert sol.values == {"x": Fraction(7, 2), "y": -3}
    assert sol.objective_value == Fraction(-5, 2)


def test_unknown_variable_is_an_error():
    lp = LinearProgram()
    lp.add_variable("x")
    lp.add_constraint({"z": 1}, "<=", 1)
    with pytest.raises(LpError):
        solve_lp(lp)


small = st.integers(-4, 4).map(Fraction)


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(
    st.just(n),
    st.lists(st.tuples(st.lists(small, min_size=n, max_size=n), small), min_size=1, max_size=4),
    st.lists(small, min_size=n, max_size=n),
    st.sampled_from(["max", "min"]))))
def test_matches_vertex_enumeration(case):
    n, rows, obj, sense = case
    box = 5
    lp = LinearProgram()
    names = [f"x{i}" for i in range(n)]
    for v in names:
        lp.add_variable(v, 0, box)
    for r, b in rows:
        lp.add_constraint(dict(zip(names, r)), "<=", b)
    lp.set_objective(dict(zip(names, obj)), sense)
    sol = solve_lp(lp)
    values = [sum(c * x for c, x in zip(obj, p)) for p in vertex_optimum(n, rows, box)]
    if not values:
        assert sol.status == INFEASIBLE
        return
    assert sol.status == OPTIMAL
    want = max(values) if sense == "max" else min(values)
    assert sol.objective_value == want
    assert lp.is_feasible(sol.values)
    assert lp.evaluate(sol.values) == want


def test_deterministic_and_dumpable():
    lp = LinearProgram()
    for v in "abc":
        lp.add_variable(v)
    lp.add_constraint({"a": 1, "b": 1, "c": 1}, "<=", 1, "cap")
    lp.add_constraint({"a": Fraction(1, 3), "c": -1}, ">=", 0, "link")
    lp.set_objective({"a": 2, "b": 2, "c": 1})
    first, second = solve_lp(lp), solve_lp(lp)
    assert first == second
    text = dump_lp(lp)
    assert "1/3 a" in text and "cap:" in text
