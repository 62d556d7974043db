"""Follower security values and the leader's punishment profile."""

from __future__ import annotations

from dataclasses import dataclass

from .game import (FOLLOWER, LEADER, BehavioralStrategy, Chance, Concurrent, Follower, Game,
                   Leader, Leaf)
from .lp import OPTIMAL, LinearProgram, solve_lp
from .numeric import Fraction


@dataclass(frozen=True)
class MinmaxTable:
    mu: dict[int, Fraction]
    punish_leader: BehavioralStrategy
    punish_follower: BehavioralStrategy


def solve_matrix_game(matrix) -> tuple[Fraction, list[Fraction], list[Fraction]]:
    """Exact value of a zero-sum matrix game.

    The row player minimises and the column player maximises the entries.
    Returns ``(value, row_mix, col_mix)`` with both mixes optimal.
    """
    rows = [[Fraction(x) for x in r] for r in matrix]
    if not rows or not rows[0] or any(len(r) != len(rows[0]) for r in rows):
        raise ValueError("matrix game needs a non-empty rectangular matrix")
    m, n = len(rows), len(rows[0])

    # pure saddle point: min over rows of the row max equals max over cols of the col min
    row_max = [max(r) for r in rows]
    col_min = [min(rows[i][j] for i in range(m)) for j in range(n)]
    upper, lower = min(row_max), max(col_min)
    if upper == lower:
        i = row_max.index(upper)
        j = col_min.index(lower)
        return upper, _unit(m, i), _unit(n, j)

    lp = LinearProgram()
    xs = [lp.add_variable(f"x{i}") for i in range(m)]
    lp.add_variable("v", None, None)
    for j in range(n):
        coeffs = {x: rows[i][j] for i, x in enumerate(xs)}
        coeffs["v"] = -1
        lp.add_constraint(coeffs, "<=", 0)
    lp.add_constraint({x: 1 for x in xs}, "=", 1)
    lp.set_objective({"v": 1}, "min")
    primal = solve_lp(lp)

    lp = LinearProgram()
    ys = [lp.add_variable(f"y{j}") for j in range(n)]
    lp.add_variable("w", None, None)
    for i in range(m):
        coeffs = {y: rows[i][j] for j, y in enumerate(ys)}
        coeffs["w"] = -1
        lp.add_constraint(coeffs, ">=", 0)
    lp.add_constraint({y: 1 for y in ys}, "=", 1)
    lp.set_objective({"w": 1}, "max")
    dual = solve_lp(lp)

    if primal.status != OPTIMAL or dual.status != OPTIMAL or primal.values["v"] != dual.values["w"]:
        raise ArithmeticError("matrix game LPs disagree; solver invariant broken")
    return (primal.values["v"], [primal.values[x] for x in xs], [dual.values[y] for y in ys])


def _unit(k: int, i: int) -> list[Fraction]:
    return [Fraction(int(j == i)) for j in range(k)]


def compute_minmax(game: Game) -> MinmaxTable:
    """Backward induction for the follower's security level at every node.

    Leader nodes minimise (ties to the lowest child id), follower nodes
    maximise, chance nodes average, and concurrent nodes take the matrix-game
    value over the children's security levels.
    """
    mu: dict[int, Fraction] = {}
    lead: dict[int, dict[str, Fraction]] = {}
    foll: dict[int, dict[str, Fraction]] = {}
    for i in reversed(game.topological_order()):
        node = game.nodes[i]
        if isinstance(node, Leaf):
            mu[i] = node.u2
        elif isinstance(node, Chance):
            mu[i] = sum((p * mu[c] for p, c in node.branches), Fraction(0))
        elif isinstance(node, (Leader, Follower)):
            if isinstance(node, Leader):
                a, c = min(node.actions, key=lambda ac: (mu[ac[1]], ac[1]))
                lead[i] = {a: Fraction(1)}
            else:
                a, c = min(node.actions, key=lambda ac: (-mu[ac[1]], ac[1]))
                foll[i] = {a: Fraction(1)}
            mu[i] = mu[c]
        else:
            matrix = [[mu[node.child(r, col)] for col in node.cols] for r in node.rows]
            value, rmix, cmix = solve_matrix_game(matrix)
            mu[i] = value
            lead[i] = {r: p for r, p in zip(node.rows, rmix) if p}
            foll[i] = {col: p for col, p in zip(node.cols, cmix) if p}
    return MinmaxTable(mu, BehavioralStrategy(LEADER, lead), BehavioralStrategy(FOLLOWER, foll))
