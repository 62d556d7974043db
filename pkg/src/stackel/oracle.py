"""Brute-force reference solvers for small games.

These enumerate what the fast algorithms reason about implicitly and refuse
inputs beyond an explicit budget instead of degrading.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .budget import BudgetExceeded, OracleBudget
from .game import (FOLLOWER, LEADER, BehavioralStrategy, Chance, Concurrent, Follower, Game,
                   GameError, Leader, Leaf, PureStrategy, classify, leader_favoring_response,
                   player_nodes, require_valid)
from .lp import OPTIMAL, LinearProgram, solve_lp
from .minmax import compute_minmax
from .numeric import Fraction
from .pure_dag import PureCommitmentSolution
from .sefce import ExplicitCorrelatedDistribution


def _no_concurrent(game: Game, what: str) -> None:
    for i, node in enumerate(game.nodes):
        if isinstance(node, Concurrent):
            raise GameError(f"{what}: node {i} is concurrent; turn-based games only")


def _leader_pure_strategies(game: Game, budget: OracleBudget, what: str):
    budget.check_nodes(len(game.decision_nodes()), what)
    nodes = [i for i, nd in enumerate(game.nodes) if isinstance(nd, Leader)]
    options = [[a for a, _ in game.nodes[i].actions] for i in nodes]
    count = 1
    for o in options:
        count *= len(o)
    budget.check_profiles(count, what)
    for combo in itertools.product(*options):
        yield PureStrategy(LEADER, dict(zip(nodes, combo)))


def _single_leaf(game: Game, s1: PureStrategy, s2: PureStrategy):
    """The leaf reached by a pure profile, or None when chance intervenes."""
    s = game.root
    while True:
        node = game.nodes[s]
        if isinstance(node, Leaf):
            return s
        if isinstance(node, Chance):
            live = [c for p, c in node.branches if p]
            if len(live) != 1:
                return None
            s = live[0]
        elif isinstance(node, Leader):
            s = dict(node.actions)[s1.choice[s]]
        else:
            s = dict(node.actions)[s2.choice[s]]


def brute_force_pure_stackelberg(game: Game,
                                 budget: OracleBudget | None = None) -> PureCommitmentSolution:
    """Best leader pure commitment against a leader-favoring best response.

    Ties between leader strategies go to the first in enumeration order
    (leader nodes by id, actions in listed order). ``chosen_leaf`` is None
    when chance makes the outcome random.
    """
    require_valid(game)
    _no_concurrent(game, "pure oracle")
    budget = budget or OracleBudget.from_env()
    best = None
    for s1 in _leader_pure_strategies(game, budget, "pure oracle"):
        s2, val = leader_favoring_response(game, s1.to_behavioral())
        u1, u2 = val[game.root]
        if best is None or u1 > best[0]:
            best = (u1, u2, s1, s2)
    u1, u2, s1, s2 = best
    return PureCommitmentSolution(s1, s2, _single_leaf(game, s1, s2), u1, u2)


def reachable_outcomes(game: Game, budget: OracleBudget | None = None) -> set[int]:
    """Leaves reached by some leader pure strategy and some follower best response.

    Chance-free turn-based games only. A follower best response may break
    ties arbitrarily here, so this is the full set of steerable outcomes.
    """
    require_valid(game)
    _no_concurrent(game, "reachability oracle")
    if any(isinstance(nd, Chance) for nd in game.nodes):
        raise GameError("reachability oracle: chance nodes are not supported")
    budget = budget or OracleBudget.from_env()
    order = game.topological_order()
    found: set[int] = set()
    for s1 in _leader_pure_strategies(game, budget, "reachability oracle"):
        best: dict[int, Fraction] = {}
        for i in reversed(order):
            node = game.nodes[i]
            if isinstance(node, Leaf):
                best[i] = node.u2
            elif isinstance(node, Leader):
                best[i] = best[dict(node.actions)[s1.choice[i]]]
            else:
                best[i] = max(best[c] for _, c in node.actions)
        target = best[game.root]
        seen = {game.root}
        stack = [game.root]
        while stack:
            i = stack.pop()
            node = game.nodes[i]
            if isinstance(node, Leaf):
                if node.u2 == target:
                    found.add(i)
                continue
            if isinstance(node, Leader):
                nxt = [dict(node.actions)[s1.choice[i]]]
            else:
                # only moves that keep the optimum available stay on a best-response path
                nxt = [c for _, c in node.actions if best[c] == target]
            for c in nxt:
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
    return found


# --------------------------------------------------------------------------
# correlated equilibrium over reduced pure profiles


@dataclass(frozen=True)
class _Plan:
    assign: tuple          # ((node, (leader_action, follower_action)), ...)
    u1: Fraction
    u2: Fraction
    # (node, leader_action, follower_action, reach, continuation_u2) relative to plan root
    visits: tuple


def _plans(game: Game, s: int, limit: int) -> list[_Plan]:
    node = game.nodes[s]
    if isinstance(node, Leaf):
        return [_Plan((), node.u1, node.u2, ())]
    if isinstance(node, Chance):
        parts = [(p, _plans(game, c, limit)) for p, c in node.branches if p]
        total = 1
        for _, ps in parts:
            total *= len(ps)
        if total > limit:
            raise BudgetExceeded(f"SEFCE oracle: over {limit} reduced profiles", total)
        out = []
        for combo in itertools.product(*(ps for _, ps in parts)):
            assign, visits = [], []
            u1 = u2 = Fraction(0)
            for (p, _), plan in zip(parts, combo):
                assign.extend(plan.assign)
                u1 += p * plan.u1
                u2 += p * plan.u2
                visits.extend((v[0], v[1], v[2], p * v[3], v[4]) for v in plan.visits)
            out.append(_Plan(tuple(assign), u1, u2, tuple(visits)))
        return out
    if isinstance(node, Leader):
        moves = [(a, None, c) for a, c in node.actions]
    elif isinstance(node, Follower):
        moves = [(None, a, c) for a, c in node.actions]
    else:
        moves = [(r, col, c) for r, col, c in node.grid()]
    out = []
    for la, fa, c in moves:
        for plan in _plans(game, c, limit):
            out.append(_Plan(((s, (la, fa)),) + plan.assign, plan.u1, plan.u2,
                             ((s, la, fa, Fraction(1), plan.u2),) + plan.visits))
            if len(out) > limit:
                raise BudgetExceeded(f"SEFCE oracle: over {limit} reduced profiles", len(out))
    return out


def brute_force_sefce(game: Game, budget: OracleBudget | None = None):
    """Leader-optimal correlated distribution, by one LP over pure profiles.

    Profiles are reduced: they fix actions only where they themselves lead
    (all chance branches included). A follower who ignores a signal is valued
    at the security level of the subtree the follower deviates into, which the leader
    can always enforce by punishing. Returns ``(value, distribution)``.
    """
    require_valid(game)
    if classify(game).graph != "tree":
        raise GameError("SEFCE oracle: trees only")
    budget = budget or OracleBudget.from_env()
    budget.check_nodes(len(game.decision_nodes()), "SEFCE oracle")
    mu = compute_minmax(game).mu
    plans = _plans(game, game.root, budget.max_pure_profiles)

    lp = LinearProgram()
    names = [lp.add_variable(f"phi{k}") for k in range(len(plans))]
    lp.add_constraint({v: 1 for v in names}, "=", 1, "total")
    rows: dict[tuple, dict[str, Fraction]] = {}
    for v, plan in zip(names, plans):
        for s, la, fa, reach, cont in plan.visits:
            node = game.nodes[s]
            if isinstance(node, Follower):
                alts = [(alt, c) for alt, c in node.actions if alt != fa]
            elif isinstance(node, Concurrent):
                alts = [(alt, node.child(la, alt)) for alt in node.cols if alt != fa]
            else:
                continue
            for alt, dev_child in alts:
                coeff = reach * (cont - mu[dev_child])
                row = rows.setdefault((s, fa, alt), {})
                row[v] = row.get(v, Fraction(0)) + coeff
    for (s, fa, alt), coeffs in sorted(rows.items()):
        lp.add_constraint(coeffs, ">=", 0, f"ic_{s}_{fa}_{alt}")
    lp.set_objective({v: plan.u1 for v, plan in zip(names, plans)}, "max")
    sol = solve_lp(lp)
    if sol.status != OPTIMAL:
        raise ArithmeticError(f"SEFCE oracle LP ended {sol.status}; the punishment profile "
                              "should always be feasible")
    support = []
    for v, plan in zip(names, plans):
        w = sol.values[v]
        if w:
            lead = {s: la for s, (la, _) in plan.assign if la is not None}
            foll = {s: fa for s, (_, fa) in plan.assign if fa is not None}
            support.append(((PureStrategy(LEADER, lead), PureStrategy(FOLLOWER, foll)), w))
    return sol.objective_value, ExplicitCorrelatedDistribution(tuple(support))


# --------------------------------------------------------------------------
# behavioral commitment on a grid


def _grid_mixes(labels, g: int):
    k = len(labels)
    for cut in itertools.combinations(range(g + k - 1), k - 1):
        parts, prev = [], -1
        for c in cut + (g + k - 1,):
            parts.append(c - prev - 1)
            prev = c
        yield {a: Fraction(n, g) for a, n in zip(labels, parts) if n}


def grid_behavioral_stackelberg(game: Game, grid: int,
                                budget: OracleBudget | None = None) -> Fraction:
    """Best leader value over behavioral strategies with probabilities in ``{0, 1/g, ..., 1}``.

    Works bottom-up on trees: each subtree keeps the set of distinct
    (leader, follower) outcome pairs reachable by grid strategies against a
    leader-favoring best response. The result is a certified lower bound on
    the behavioral commitment value.

    Only the best leader utility per follower utility is kept: raising the
    leader's payoff at a fixed follower payoff can only raise it further up,
    through mixing, chance and leader-favoring follower choices alike.
    """
    require_valid(game)
    if grid < 1:
        raise ValueError("grid denominator must be >= 1")
    if classify(game).graph != "tree":
        raise GameError("grid oracle: trees only")
    budget = budget or OracleBudget.from_env()
    budget.check_nodes(len(game.decision_nodes()), "grid oracle")
    limit = budget.max_pure_profiles
    sets: dict[int, set] = {}

    def guard(size):
        if size > limit:
            raise BudgetExceeded(f"grid oracle: outcome combinations exceed {limit}", size)

    for i in reversed(game.topological_order()):
        node = game.nodes[i]
        if isinstance(node, Leaf):
            sets[i] = {(node.u1, node.u2)}
            continue
        if isinstance(node, Chance):
            live = [(p, c) for p, c in node.branches if p]
            guard(_prod(len(sets[c]) for _, c in live))
            out = set()
            for combo in itertools.product(*(sorted(sets[c]) for _, c in live)):
                out.add((sum((p * x[0] for (p, _), x in zip(live, combo)), Fraction(0)),
                         sum((p * x[1] for (p, _), x in zip(live, combo)), Fraction(0))))
            sets[i] = out
        elif isinstance(node, Follower):
            kids = [c for _, c in node.actions]
            guard(_prod(len(sets[c]) for c in kids))
            sets[i] = {max(combo, key=lambda x: (x[1], x[0]))
                       for combo in itertools.product(*(sorted(sets[c]) for c in kids))}
        elif isinstance(node, Leader):
            labels = [a for a, _ in node.actions]
            kids = dict(node.actions)
            mixes = list(_grid_mixes(labels, grid))
            out = set()
            for mix in mixes:
                used = [a for a in labels if a in mix]
                guard(len(mixes) * _prod(len(sets[kids[a]]) for a in used))
                for combo in itertools.product(*(sorted(sets[kids[a]]) for a in used)):
                    out.add((sum((mix[a] * x[0] for a, x in zip(used, combo)), Fraction(0)),
                             sum((mix[a] * x[1] for a, x in zip(used, combo)), Fraction(0))))
            sets[i] = out
        else:
            cells = {(r, col): c for r, col, c in node.grid()}
            mixes = list(_grid_mixes(list(node.rows), grid))
            kids = sorted(set(node.cells))
            guard(len(mixes) * _prod(len(sets[c]) for c in kids))
            out = set()
            for combo in itertools.product(*(sorted(sets[c]) for c in kids)):
                pick = dict(zip(kids, combo))
                for mix in mixes:
                    best = None
                    for col in node.cols:
                        v = (sum((p * pick[cells[(r, col)]][0] for r, p in mix.items()), Fraction(0)),
                             sum((p * pick[cells[(r, col)]][1] for r, p in mix.items()), Fraction(0)))
                        if best is None or (v[1], v[0]) > (best[1], best[0]):
                            best = v
                    out.add(best)
            sets[i] = out
        sets[i] = _prune(sets[i])
    return max(x[0] for x in sets[game.root])


def grid_tradeoff_frontiers(game: Game, grid: int,
                            budget: OracleBudget | None = None) -> dict[int, list]:
    """Per-node Pareto frontier of (leader, follower) outcomes of grid strategies.

    Turn-based trees with chance only. Off the follower's chosen branch the
    leader punishes, so a branch is available exactly when it offers the
    follower at least the minmax value of each sibling. Under that reading a
    dominated outcome is never needed, and only the Pareto frontier is kept,
    sorted by follower utility descending.
    """
    require_valid(game)
    if grid < 1:
        raise ValueError("grid denominator must be >= 1")
    if classify(game).graph != "tree":
        raise GameError("grid frontiers: trees only")
    _no_concurrent(game, "grid frontiers")
    budget = budget or OracleBudget.from_env()
    limit = budget.max_pure_profiles
    mu = compute_minmax(game).mu
    sets: dict[int, list] = {}
    for i in reversed(game.topological_order()):
        node = game.nodes[i]
        if isinstance(node, Leaf):
            sets[i] = [(node.u1, node.u2)]
            continue
        if isinstance(node, Follower):
            kids = [c for _, c in node.actions]
            out = []
            for c in kids:
                threat = max((mu[o] for o in kids if o != c), default=None)
                out += [x for x in sets[c] if threat is None or x[1] >= threat]
            sets[i] = _pareto(out)
            continue
        if isinstance(node, Chance):
            parts = [(p, c) for p, c in node.branches if p]
        else:
            parts = None
        mixes = [None] if parts is not None else list(_grid_mixes([a for a, _ in node.actions], grid))
        out = []
        for mix in mixes:
            if parts is None:
                kids = dict(node.actions)
                weights = [(w, kids[a]) for a, w in mix.items()]
            else:
                weights = parts
            acc = [(Fraction(0), Fraction(0))]
            for w, c in weights:
                if len(acc) * len(sets[c]) > limit:
                    raise BudgetExceeded(f"grid frontiers: combinations exceed {limit}",
                                         len(acc) * len(sets[c]))
                acc = _pareto([(x1 + w * y1, x2 + w * y2) for x1, x2 in acc for y1, y2 in sets[c]])
            out += acc
        sets[i] = _pareto(out)
    return sets


def _pareto(points) -> list:
    out = []
    for u1, u2 in sorted(set(points), key=lambda x: (-x[1], -x[0])):
        if not out or u1 > out[-1][0]:
            out.append((u1, u2))
    return out


def _prune(points) -> set:
    best: dict = {}
    for u1, u2 in points:
        if u2 not in best or u1 > best[u2]:
            best[u2] = u1
    return {(u1, u2) for u2, u1 in best.items()}


def _prod(values) -> int:
    out = 1
    for v in values:
        out *= v
    return out


# --------------------------------------------------------------------------
# knapsack reduction games


def _reduction_shape(game: Game) -> list[int]:
    """Subgame ids of a knapsack reduction game; raises if the shape is wrong."""
    root = game.nodes[game.root]
    if not isinstance(root, Concurrent) or len(root.cols) != len(root.rows) + 1:
        raise GameError("not a knapsack reduction game: root must be concurrent with N rows "
                        "and N + 1 columns")
    subgames = []
    for r in root.rows:
        sub = root.child(r, root.cols[0])
        nd = game.nodes[sub]
        if not (isinstance(nd, Concurrent) and len(nd.rows) == 2 and len(nd.cols) == 2
                and all(isinstance(game.nodes[c], Leaf) for c in nd.cells)):
            raise GameError("not a knapsack reduction game: first column must lead to 2x2 "
                            "subgames over leaves")
        subgames.append(sub)
        for col in root.cols[1:]:
            if not isinstance(game.nodes[root.child(r, col)], Leaf):
                raise GameError("not a knapsack reduction game: other columns must be leaves")
    return subgames


def reduction_exact_behavioral(game: Game, budget: OracleBudget | None = None) -> Fraction:
    """Behavioral commitment value of a knapsack reduction game.

    The leader may be assumed to mix uniformly at the root and to play purely
    inside each subgame, so 2^N subgame assignments cover every candidate.
    """
    require_valid(game)
    subgames = _reduction_shape(game)
    budget = budget or OracleBudget.from_env()
    budget.check_profiles(2 ** len(subgames), "reduction oracle")
    root = game.nodes[game.root]
    uniform = {r: Fraction(1, len(root.rows)) for r in root.rows}
    best = None
    for choice in itertools.product(*(game.nodes[s].rows for s in subgames)):
        mix = {game.root: uniform}
        mix.update({s: {a: Fraction(1)} for s, a in zip(subgames, choice)})
        _, val = leader_favoring_response(game, BehavioralStrategy(LEADER, mix))
        u1 = val[game.root][0]
        if best is None or u1 > best:
            best = u1
    return best
