"""SEFCE of concurrent-move trees as one linear program over reach flows.

For every node the LP carries its reach probability ``d`` and the follower's
utility mass ``v`` collected below it (utility times probability). Turn-based
follower nodes are read as 1-row matrices and leader nodes as 1-column ones,
so one incentive family covers both node types.
"""

from __future__ import annotations

from dataclasses import dataclass

from .game import (FOLLOWER, LEADER, BehavioralStrategy, Chance, Concurrent, Follower, Game,
                   GameError, Leader, Leaf, classify, player_nodes, require_valid)
from .lp import OPTIMAL, LinearProgram, LpSolution, solve_lp
from .minmax import MinmaxTable, compute_minmax
from .numeric import Fraction
from .sefce import CompactSEFCE


def reach_var(s: int) -> str:
    return f"d{s}"


def mass_var(s: int) -> str:
    return f"v{s}"


def _matrix(node):
    """(rows, cols, child(row, col)) view of a decision node."""
    if isinstance(node, Concurrent):
        return node.rows, node.cols, node.child
    if isinstance(node, Follower):
        kids = dict(node.actions)
        return ("",), tuple(kids), lambda r, col: kids[col]
    kids = dict(node.actions)
    return tuple(kids), ("",), lambda r, col: kids[r]


def build_sefce_lp(game: Game, mm: MinmaxTable | None = None) -> LinearProgram:
    require_valid(game)
    if classify(game).graph != "tree":
        raise GameError("the SEFCE linear program is formulated for trees")
    mm = mm or compute_minmax(game)
    mu = mm.mu
    lp = LinearProgram()
    for s in range(len(game.nodes)):
        lp.add_variable(reach_var(s), 0, 1)
        lp.add_variable(mass_var(s), None, None)
    lp.add_constraint({reach_var(game.root): 1}, "=", 1, "root")
    for s, node in enumerate(game.nodes):
        d, v = reach_var(s), mass_var(s)
        if isinstance(node, Leaf):
            lp.add_constraint({v: 1, d: -node.u2}, "=", 0, f"mass_{s}")
            continue
        kids = game.children(s)
        coeffs = {mass_var(c): -1 for c in kids}
        coeffs[v] = 1
        lp.add_constraint(coeffs, "=", 0, f"mass_{s}")
        if isinstance(node, Chance):
            for p, c in node.branches:
                lp.add_constraint({reach_var(c): 1, d: -p}, "=", 0, f"chance_{s}_{c}")
            continue
        coeffs = {reach_var(c): -1 for c in kids}
        coeffs[d] = 1
        lp.add_constraint(coeffs, "=", 0, f"flow_{s}")
        if isinstance(node, Leader):
            continue
        rows, cols, child = _matrix(node)
        for a in cols:
            for alt in cols:
                if alt == a:
                    continue
                coeffs: dict[str, Fraction] = {}
                for r in rows:
                    c = child(r, a)
                    coeffs[mass_var(c)] = coeffs.get(mass_var(c), Fraction(0)) + 1
                    coeffs[reach_var(c)] = coeffs.get(reach_var(c), Fraction(0)) - mu[child(r, alt)]
                lp.add_constraint(coeffs, ">=", 0, f"ic_{s}_{a}_{alt}")
    lp.set_objective({reach_var(z): game.nodes[z].u1 for z in game.leaves()}, "max")
    return lp


@dataclass(frozen=True)
class FlowSolution:
    delta: dict[int, Fraction]
    v2: dict[int, Fraction]
    leader_value: Fraction
    compact: CompactSEFCE
    lp: LinearProgram
    raw: LpSolution


def solve_sefce_concurrent(game: Game) -> FlowSolution:
    """Exact SEFCE of a tree with concurrent and/or turn-based nodes."""
    mm = compute_minmax(game)
    lp = build_sefce_lp(game, mm)
    sol = solve_lp(lp)
    if sol.status != OPTIMAL:
        raise ArithmeticError(f"SEFCE LP ended {sol.status}; punishing everywhere is always "
                              "feasible, so this is a solver fault")
    delta = {s: sol.values[reach_var(s)] for s in range(len(game.nodes))}
    v2 = {s: sol.values[mass_var(s)] for s in range(len(game.nodes))}

    lead: dict[int, dict[str, Fraction]] = {}
    foll: dict[int, dict[str, Fraction]] = {}
    joint: dict[int, dict[tuple[str, str], Fraction]] = {}
    for s, node in enumerate(game.nodes):
        if isinstance(node, (Leaf, Chance)) or not delta[s]:
            continue
        if isinstance(node, (Leader, Follower)):
            mix = {a: delta[c] / delta[s] for a, c in node.actions if delta[c]}
            (lead if isinstance(node, Leader) else foll)[s] = mix
        else:
            cells = {(r, col): delta[c] / delta[s] for r, col, c in node.grid() if delta[c]}
            joint[s] = cells
            rm: dict[str, Fraction] = {}
            cm: dict[str, Fraction] = {}
            for (r, col), p in cells.items():
                rm[r] = rm.get(r, Fraction(0)) + p
                cm[col] = cm.get(col, Fraction(0)) + p
            lead[s], foll[s] = rm, cm
    for s in player_nodes(game, LEADER):
        lead.setdefault(s, dict(mm.punish_leader.mix[s]))
    for s in player_nodes(game, FOLLOWER):
        foll.setdefault(s, dict(mm.punish_follower.mix[s]))
    on_path = frozenset(s for s, d in delta.items() if d)
    compact = CompactSEFCE(BehavioralStrategy(LEADER, lead), BehavioralStrategy(FOLLOWER, foll),
                           mm, (v2[game.root], sol.objective_value), on_path, joint)
    return FlowSolution(delta, v2, sol.objective_value, compact, lp, sol)
