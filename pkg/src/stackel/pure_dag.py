"""Pure-strategy commitment on turn-based DAGs without chance.

Every node gets a capacity: the least follower utility an outcome below it
must offer so that some leader commitment steers the follower there. A leaf
is a possible outcome when its follower utility meets its capacity, and the
leader simply picks the best possible outcome.
"""

from __future__ import annotations

from dataclasses import dataclass

from .game import (FOLLOWER, LEADER, Follower, Game, GameError, Leader, Leaf, PureStrategy,
                   leader_favoring_response, require_valid)
from .minmax import MinmaxTable, compute_minmax
from .numeric import NEG_INF, POS_INF, Fraction


@dataclass(frozen=True)
class CapacityTable:
    gamma: dict  # node -> Fraction | ExtendedInfinity


@dataclass(frozen=True)
class PureCommitmentSolution:
    leader_strategy: PureStrategy
    follower_response: PureStrategy
    chosen_leaf: int
    leader_value: Fraction
    follower_value: Fraction


def _require_turn_based_no_chance(game: Game) -> None:
    for i, node in enumerate(game.nodes):
        if not isinstance(node, (Leaf, Leader, Follower)):
            raise GameError(f"node {i}: pure-DAG solver handles only leader/follower/leaf nodes")


def _sibling_threats(game: Game, s: int, mm: MinmaxTable) -> dict[int, object]:
    """Max security value over the *other* children of follower node ``s``."""
    kids = sorted(set(game.children(s)))
    top = [(NEG_INF, -1), (NEG_INF, -1)]
    for c in kids:
        v = mm.mu[c]
        if v > top[0][0]:
            top = [(v, c), top[0]]
        elif v > top[1][0]:
            top[1] = (v, c)
    return {c: (top[1][0] if c == top[0][1] else top[0][0]) for c in kids}


def _edge_requirement(game, s, c, gamma, threats):
    if isinstance(game.nodes[s], Leader):
        return gamma[s]
    return max(gamma[s], threats[s][c])


def compute_capacities(game: Game, mm: MinmaxTable | None = None) -> CapacityTable:
    _require_turn_based_no_chance(game)
    mm = mm or compute_minmax(game)
    gamma = {i: POS_INF for i in range(len(game.nodes))}
    gamma[game.root] = NEG_INF
    threats = {s: _sibling_threats(game, s, mm)
               for s, nd in enumerate(game.nodes) if isinstance(nd, Follower)}
    for s in game.topological_order():
        node = game.nodes[s]
        if isinstance(node, Leaf):
            continue
        for c in set(game.children(s)):
            gamma[c] = min(gamma[c], _edge_requirement(game, s, c, gamma, threats))
    return CapacityTable(gamma)


def possible_outcomes(game: Game, table: CapacityTable) -> list[int]:
    return [z for z in game.leaves() if game.nodes[z].u2 >= table.gamma[z]]


def solve_pure_dag(game: Game) -> PureCommitmentSolution:
    """Exact pure Stackelberg commitment (leader-favoring follower ties)."""
    require_valid(game)
    _require_turn_based_no_chance(game)
    mm = compute_minmax(game)
    table = compute_capacities(game, mm)
    gamma = table.gamma
    outcomes = possible_outcomes(game, table)
    z = max(outcomes, key=lambda i: (game.nodes[i].u1, game.nodes[i].u2, -i))
    target = game.nodes[z].u2

    # walk back to the root through parents whose requirement fits the target
    threats = {s: _sibling_threats(game, s, mm)
               for s, nd in enumerate(game.nodes) if isinstance(nd, Follower)}
    parents = game.parents()
    path = [z]
    while path[-1] != game.root:
        c = path[-1]
        p = min(q for q in set(parents[c])
                if _edge_requirement(game, q, c, gamma, threats) <= target)
        path.append(p)
    path.reverse()
    nxt = dict(zip(path, path[1:]))

    lead: dict[int, str] = {}
    for s, node in enumerate(game.nodes):
        if isinstance(node, Leader):
            if s in nxt:
                lead[s] = next(a for a, c in node.actions if c == nxt[s])
            else:
                (a, p), = mm.punish_leader.mix[s].items()
                lead[s] = a
    leader = PureStrategy(LEADER, lead)
    response, _ = leader_favoring_response(game, leader.to_behavioral())
    foll = dict(response.choice)
    for s in path:
        if isinstance(game.nodes[s], Follower):
            foll[s] = next(a for a, c in game.nodes[s].actions if c == nxt[s])
    leaf = game.nodes[z]
    return PureCommitmentSolution(leader, PureStrategy(FOLLOWER, foll), z, leaf.u1, leaf.u2)
