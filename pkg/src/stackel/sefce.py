"""Stackelberg extensive-form correlated equilibria on turn-based trees.

Upward pass: every node gets the convex set of (follower, leader) utility
pairs achievable in its subtree by an incentive-compatible recommendation
scheme. Leader nodes take the hull of their children, follower nodes first
cut each child at the best threat available through its siblings, and chance
nodes take the weighted Minkowski sum.

Downward pass: starting from the leader-optimal point of the root set, each
target point is written as a mix of at most two child points (or split across
chance children), which yields the on-path recommendations. Everything off
the recommended path plays the punishment profile.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .budget import BudgetExceeded, OracleBudget
from .game import (FOLLOWER, LEADER, BehavioralStrategy, Chance, Concurrent, Follower, Game,
                   GameError, Leader, Leaf, PureStrategy, classify, player_nodes,
                   reach_probabilities, require_valid, subtree_values, transitions)
from .geometry import (Hull2D, GeometryError, decompose, hull_merge, max_y_point,
                       minkowski_weighted, min_x, restrict_halfspace, split_minkowski)
from .minmax import MinmaxTable, compute_minmax
from .numeric import Fraction


@dataclass(frozen=True)
class CompactSEFCE:
    """On-path recommendations plus punishment after any deviation.

    ``leader`` and ``follower`` are total behavioral strategies; nodes off the
    recommended path carry the punishment profile. ``joint`` holds correlated
    cell distributions at concurrent nodes (their marginals also appear in the
    two strategies). ``value_point`` is (follower utility, leader utility).
    """

    leader: BehavioralStrategy
    follower: BehavioralStrategy
    punishment: MinmaxTable
    value_point: tuple[Fraction, Fraction]
    on_path: frozenset = frozenset()
    joint: dict = field(default_factory=dict)

    @property
    def leader_value(self) -> Fraction:
        return self.value_point[1]

    @property
    def follower_value(self) -> Fraction:
        return self.value_point[0]


def _compact_transition(game: Game, c: CompactSEFCE):
    def edges(i):
        if i in c.joint:
            node = game.nodes[i]
            return [(c.joint[i].get((r, col), Fraction(0)), node.child(r, col))
                    for r, col, _ in node.grid()]
        return transitions(game, i, c.leader, c.follower)
    return edges


def compact_values(game: Game, c: CompactSEFCE) -> dict[int, tuple[Fraction, Fraction]]:
    """Expected ``(u1, u2)`` of every subtree under the recommendations."""
    return subtree_values(game, c.leader, c.follower, transition=_compact_transition(game, c))


def compact_reach(game: Game, c: CompactSEFCE) -> dict[int, Fraction]:
    edges = _compact_transition(game, c)
    prob = {i: Fraction(0) for i in range(len(game.nodes))}
    prob[game.root] = Fraction(1)
    for i in game.topological_order():
        if prob[i]:
            for p, ch in edges(i):
                if p:
                    prob[ch] += prob[i] * p
    return prob


def compact_leaf_distribution(game: Game, c: CompactSEFCE) -> dict[int, Fraction]:
    prob = compact_reach(game, c)
    return {z: prob[z] for z in game.leaves()}


# --------------------------------------------------------------------------
# upward pass


def _require_turn_based_tree(game: Game) -> None:
    require_valid(game)
    if classify(game).graph != "tree":
        raise GameError("the hull-based SEFCE solver needs a tree")
    for i, node in enumerate(game.nodes):
        if isinstance(node, Concurrent):
            raise GameError(f"node {i} is concurrent; use the LP solver for concurrent games")


def _upward(game: Game):
    hulls: dict[int, Hull2D] = {}
    restricted: dict[int, list[Hull2D]] = {}
    for i in reversed(game.topological_order()):
        node = game.nodes[i]
        if isinstance(node, Leaf):
            hulls[i] = Hull2D.point(node.u2, node.u1, ("leaf", i))
        elif isinstance(node, Leader):
            hulls[i] = hull_merge([hulls[c] for _, c in node.actions])
        elif isinstance(node, Follower):
            lows = [min_x(hulls[c]) for _, c in node.actions]
            cut = []
            for k, (_, c) in enumerate(node.actions):
                others = lows[:k] + lows[k + 1:]
                cut.append(restrict_halfspace(hulls[c], max(others)) if others else hulls[c])
            restricted[i] = cut
            usable = [(h, k) for k, h in enumerate(cut) if not h.is_empty]
            hulls[i] = hull_merge([h for h, _ in usable], [k for _, k in usable])
        else:
            hulls[i] = minkowski_weighted([(hulls[c], p) for p, c in node.branches if p])
    return hulls, restricted


def upward_pass(game: Game, mm: MinmaxTable | None = None) -> dict[int, Hull2D]:
    """Achievable (follower, leader) utility set of every subtree.

    ``mm`` is accepted for interface symmetry; the thresholds are read off
    the unrestricted child hulls, whose leftmost x equals the security value.
    """
    _require_turn_based_tree(game)
    return _upward(game)[0]


def restricted_hulls(game: Game) -> dict[int, list[Hull2D]]:
    """Per follower node, its children's hulls after the deviation cut."""
    _require_turn_based_tree(game)
    return _upward(game)[1]


# --------------------------------------------------------------------------
# downward pass


def _split_two(h: Hull2D, target):
    """Mix of at most two children reproducing ``target`` on merged hull ``h``.

    Returns ``[(child_rank, weight, child_target)]``.
    """
    try:
        dec = decompose(h, target)
    except GeometryError as exc:
        raise ArithmeticError(f"downward pass left the hull boundary: {exc}") from None
    ka, kb = dec.tag_a[0], dec.tag_b[0]
    if dec.alpha == 1 or ka == kb:
        if ka == kb and dec.alpha != 1:
            return [(ka, Fraction(1), target)]
        return [(ka, Fraction(1), dec.point_a)]
    return [(ka, dec.alpha, dec.point_a), (kb, 1 - dec.alpha, dec.point_b)]


def solve_sefce_tree(game: Game) -> CompactSEFCE:
    """Exact SEFCE of a turn-based tree (chance nodes allowed)."""
    _require_turn_based_tree(game)
    mm = compute_minmax(game)
    hulls, _ = _upward(game)
    root_point = max_y_point(hulls[game.root])

    lead: dict[int, dict[str, Fraction]] = {}
    foll: dict[int, dict[str, Fraction]] = {}
    on_path = set()
    stack = [(game.root, root_point)]
    while stack:
        s, target = stack.pop()
        on_path.add(s)
        node = game.nodes[s]
        if isinstance(node, Leaf):
            continue
        if isinstance(node, Chance):
            live = [(p, c) for p, c in node.branches if p]
            try:
                points = split_minkowski([(hulls[c], p) for p, c in live], target)
            except GeometryError as exc:
                raise ArithmeticError(f"downward pass at chance node {s}: {exc}") from None
            stack.extend((c, pt) for (_, c), pt in zip(live, points))
            continue
        pieces = _split_two(hulls[s], target)
        out = lead if isinstance(node, Leader) else foll
        mix: dict[str, Fraction] = {}
        for k, w, pt in pieces:
            label, child = node.actions[k]
            mix[label] = mix.get(label, Fraction(0)) + w
            stack.append((child, pt))
        out[s] = mix

    for s in player_nodes(game, LEADER):
        lead.setdefault(s, dict(mm.punish_leader.mix[s]))
    for s in player_nodes(game, FOLLOWER):
        foll.setdefault(s, dict(mm.punish_follower.mix[s]))
    return CompactSEFCE(BehavioralStrategy(LEADER, lead), BehavioralStrategy(FOLLOWER, foll),
                        mm, root_point, frozenset(on_path))


# --------------------------------------------------------------------------
# incentive check


@dataclass(frozen=True)
class Deviation:
    node: int
    recommended: str
    alternative: str
    on_path_value: Fraction
    deviation_value: Fraction


@dataclass(frozen=True)
class DeviationReport:
    violations: tuple[Deviation, ...]
    checked: int

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_no_deviation(game: Game, c: CompactSEFCE) -> DeviationReport:
    """Check that no follower signal is worth ignoring.

    At every follower (or concurrent) node reached with positive probability,
    obeying a recommended action must be worth, in expectation over the
    leader's correlated play, at least the punishment value of every other
    action.
    """
    mu = c.punishment.mu
    values = compact_values(game, c)
    reach = compact_reach(game, c)
    bad: list[Deviation] = []
    checked = 0
    for s, node in enumerate(game.nodes):
        if not reach[s]:
            continue
        if isinstance(node, Follower):
            for a, child in node.actions:
                if not c.follower.prob(s, a):
                    continue
                for alt, other in node.actions:
                    if alt == a:
                        continue
                    checked += 1
                    lhs, rhs = values[child][1], mu[other]
                    if lhs < rhs:
                        bad.append(Deviation(s, a, alt, lhs, rhs))
        elif isinstance(node, Concurrent):
            if s in c.joint:
                cells = c.joint[s]
            else:
                cells = {(r, col): c.leader.prob(s, r) * c.follower.prob(s, col)
                         for r, col, _ in node.grid()}
            for col in node.cols:
                if not any(cells.get((r, col), 0) for r in node.rows):
                    continue
                lhs = sum((cells.get((r, col), Fraction(0)) * values[node.child(r, col)][1]
                           for r in node.rows), Fraction(0))
                for alt in node.cols:
                    if alt == col:
                        continue
                    checked += 1
                    rhs = sum((cells.get((r, col), Fraction(0)) * mu[node.child(r, alt)]
                               for r in node.rows), Fraction(0))
                    if lhs < rhs:
                        bad.append(Deviation(s, col, alt, lhs, rhs))
    return DeviationReport(tuple(bad), checked)


# --------------------------------------------------------------------------
# explicit expansion


@dataclass(frozen=True)
class ExplicitCorrelatedDistribution:
    """Distribution over pure profiles, each a (leader, follower) pair."""

    support: tuple[tuple[tuple[PureStrategy, PureStrategy], Fraction], ...]

    def total(self) -> Fraction:
        return sum((p for _, p in self.support), Fraction(0))

    def leaf_distribution(self, game: Game) -> dict[int, Fraction]:
        out = {z: Fraction(0) for z in game.leaves()}
        for (p1, p2), w in self.support:
            reach = reach_probabilities(game, p1.to_behavioral(), p2.to_behavioral())
            for z in out:
                out[z] += w * reach[z]
        return out

    def value(self, game: Game) -> tuple[Fraction, Fraction]:
        dist = self.leaf_distribution(game)
        return (sum((p * game.nodes[z].u1 for z, p in dist.items()), Fraction(0)),
                sum((p * game.nodes[z].u2 for z, p in dist.items()), Fraction(0)))


def _local_options(game: Game, s: int, c: CompactSEFCE, recommended: bool):
    """Joint action options at a decision node: ``[(leader_a, follower_a, p)]``."""
    node = game.nodes[s]
    pun = c.punishment
    if isinstance(node, Leader):
        mix = c.leader.mix[s] if recommended else pun.punish_leader.mix[s]
        return [(a, None, p) for a, p in mix.items() if p]
    if isinstance(node, Follower):
        mix = c.follower.mix[s] if recommended else pun.punish_follower.mix[s]
        return [(None, a, p) for a, p in mix.items() if p]
    if recommended and s in c.joint:
        return [(r, col, p) for (r, col), p in c.joint[s].items() if p]
    s1 = c.leader if recommended else pun.punish_leader
    s2 = c.follower if recommended else pun.punish_follower
    return [(r, col, s1.prob(s, r) * s2.prob(s, col))
            for r in node.rows for col in node.cols if s1.prob(s, r) * s2.prob(s, col)]


def _taken_child(node, la, fa):
    if isinstance(node, Leader):
        return dict(node.actions)[la]
    if isinstance(node, Follower):
        return dict(node.actions)[fa]
    return node.child(la, fa)


def _expand(game: Game, s: int, c: CompactSEFCE, recommended: bool):
    """Distribution over partial assignments ``{node: (leader_a, follower_a)}`` below s."""
    node = game.nodes[s]
    if isinstance(node, Leaf):
        return [({}, Fraction(1))]
    if isinstance(node, Chance):
        return _product([_expand(game, ch, c, recommended) for _, ch in node.branches])
    out = []
    kids = sorted(set(game.children(s)))
    for la, fa, p in _local_options(game, s, c, recommended):
        taken = _taken_child(node, la, fa)
        parts = [_expand(game, ch, c, recommended and ch == taken) for ch in kids]
        for assign, q in _product(parts):
            full = dict(assign)
            full[s] = (la, fa)
            out.append((full, p * q))
    return out


def _product(parts):
    out = [({}, Fraction(1))]
    for dist in parts:
        out = [({**a, **b}, p * q) for a, p in out for b, q in dist]
    return out


def expand_compact(game: Game, c: CompactSEFCE,
                   budget: OracleBudget | None = None) -> ExplicitCorrelatedDistribution:
    """Explicit distribution over pure profiles for a compact SEFCE.

    A profile draws recommended actions along its own play path and the
    punishment profile everywhere else, so any deviation is met by punishment.
    """
    budget = budget or OracleBudget.from_env()
    n = len(game.decision_nodes())
    if n > budget.max_decision_nodes:
        size = 1
        for s in game.decision_nodes():
            size *= len(game.children(s))
        raise BudgetExceeded(
            f"expanding {n} decision nodes (up to about {size} profiles) exceeds the cap of "
            f"{budget.max_decision_nodes}", size)
    merged: dict = {}
    for assign, p in _expand(game, game.root, c, True):
        key = tuple(sorted(assign.items()))
        merged[key] = merged.get(key, Fraction(0)) + p
    support = []
    for key, p in sorted(merged.items(), key=lambda kv: repr(kv[0])):
        lead = {s: la for s, (la, _) in key if la is not None}
        foll = {s: fa for s, (_, fa) in key if fa is not None}
        support.append(((PureStrategy(LEADER, lead), PureStrategy(FOLLOWER, foll)), p))
    return ExplicitCorrelatedDistribution(tuple(support))
