"""Two-player sequential games: representation, validation, classification, evaluation.

Nodes live in a dense table indexed by integer id. Leaf payoffs are stored as
``(u1, u2)`` with player 1 the leader and player 2 the follower. Chance nodes
are kept explicit; nothing is flattened.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence, Union

from .numeric import Fraction, to_fraction

LEADER = "leader"
FOLLOWER = "follower"


class GameError(ValueError):
    """Raised when a game or strategy violates a structural requirement."""


class StrategyError(GameError):
    def __init__(self, message: str, node: int | None = None):
        super().__init__(message)
        self.node = node


@dataclass(frozen=True)
class Leaf:
    u1: Fraction
    u2: Fraction

    def __post_init__(self):
        object.__setattr__(self, "u1", to_fraction(self.u1))
        object.__setattr__(self, "u2", to_fraction(self.u2))


@dataclass(frozen=True)
class Leader:
    actions: tuple[tuple[str, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple((str(a), int(c)) for a, c in self.actions))


@dataclass(frozen=True)
class Follower:
    actions: tuple[tuple[str, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple((str(a), int(c)) for a, c in self.actions))


@dataclass(frozen=True)
class Concurrent:
    """Simultaneous move: leader picks a row, follower a column.

    ``cells`` is row-major: ``cells[r * len(cols) + c]`` is the child reached.
    """

    rows: tuple[str, ...]
    cols: tuple[str, ...]
    cells: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(str(r) for r in self.rows))
        object.__setattr__(self, "cols", tuple(str(c) for c in self.cols))
        object.__setattr__(self, "cells", tuple(int(c) for c in self.cells))

    def child(self, row: str, col: str) -> int:
        return self.cells[self.rows.index(row) * len(self.cols) + self.cols.index(col)]

    def grid(self) -> Iterator[tuple[str, str, int]]:
        for r, row in enumerate(self.rows):
            for c, col in enumerate(self.cols):
                yield row, col, self.cells[r * len(self.cols) + c]


@dataclass(frozen=True)
class Chance:
    branches: tuple[tuple[Fraction, int], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "branches", tuple((to_fraction(p), int(c)) for p, c in self.branches)
        )


Node = Union[Leaf, Leader, Follower, Concurrent, Chance]
DECISION_KINDS = (Leader, Follower, Concurrent)


def kind_name(node: Node) -> str:
    return type(node).__name__.lower()


def children(node: Node) -> list[int]:
    """Child ids in declaration order (duplicates kept for concurrent cells)."""
    if isinstance(node, Leaf):
        return []
    if isinstance(node, (Leader, Follower)):
        return [c for _, c in node.actions]
    if isinstance(node, Concurrent):
        return list(node.cells)
    return [c for _, c in node.branches]


@dataclass(frozen=True)
class Game:
    nodes: tuple[Node, ...]
    root: int = 0
    graph: str = "tree"

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        if self.graph not in ("tree", "dag"):
            raise GameError(f"graph must be 'tree' or 'dag', got {self.graph!r}")

    def __len__(self):
        return len(self.nodes)

    def __getitem__(self, node_id: int) -> Node:
        return self.nodes[node_id]

    def ids(self, kind=None) -> list[int]:
        if kind is None:
            return list(range(len(self.nodes)))
        return [i for i, n in enumerate(self.nodes) if isinstance(n, kind)]

    def leaves(self) -> list[int]:
        return self.ids(Leaf)

    def decision_nodes(self) -> list[int]:
        return self.ids(DECISION_KINDS)

    def children(self, node_id: int) -> list[int]:
        return children(self.nodes[node_id])

    def parents(self) -> dict[int, list[int]]:
        par: dict[int, list[int]] = {i: [] for i in range(len(self.nodes))}
        for i, node in enumerate(self.nodes):
            for c in sorted(set(children(node))):
                if 0 <= c < len(self.nodes):
                    par[c].append(i)
        return par

    def topological_order(self) -> list[int]:
        """Kahn's algorithm from the root, lowest id first among ready nodes."""
        cached = self.__dict__.get("_topo")
        if cached is None:
            cached = self._topological_order()
            object.__setattr__(self, "_topo", cached)
        return list(cached)

    def _topological_order(self) -> list[int]:
        reach = self.reachable()
        indeg = {i: 0 for i in reach}
        for i in reach:
            for c in set(children(self.nodes[i])):
                indeg[c] += 1
        heap = [i for i in reach if indeg[i] == 0]
        heapq.heapify(heap)
        order = []
        while heap:
            i = heapq.heappop(heap)
            order.append(i)
            for c in sorted(set(children(self.nodes[i]))):
                indeg[c] -= 1
                if indeg[c] == 0:
                    heapq.heappush(heap, c)
        if len(order) != len(reach):
            raise GameError("game graph contains a cycle")
        return order

    def reachable(self, start: int | None = None) -> set[int]:
        start = self.root if start is None else start
        seen = {start}
        stack = [start]
        while stack:
            i = stack.pop()
            for c in children(self.nodes[i]):
                if 0 <= c < len(self.nodes) and c not in seen:
                    seen.add(c)
                    stack.append(c)
        return seen

    def height(self, start: int | None = None) -> int:
        """Longest root-to-leaf path, in edges."""
        memo: dict[int, int] = {}
        for i in reversed(self.topological_order()):
            ch = children(self.nodes[i])
            memo[i] = 0 if not ch else 1 + max(memo[c] for c in ch)
        return memo[self.root if start is None else start]


# --------------------------------------------------------------------------
# validation and classification


@dataclass(frozen=True)
class Violation:
    kind: str
    node: int | None
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def __bool__(self):
        return self.ok


def validate(game: Game) -> ValidationReport:
    out: list[Violation] = []
    n = len(game.nodes)
    if not 0 <= game.root < n:
        return ValidationReport((Violation("root", None, f"root {game.root} out of range"),))

    for i, node in enumerate(game.nodes):
        ch = children(node)
        for c in ch:
            if not 0 <= c < n:
                out.append(Violation("dangling", i, f"node {i} points to missing node {c}"))
        if isinstance(node, (Leader, Follower)):
            if not node.actions:
                out.append(Violation("no-actions", i, f"node {i} has no actions"))
            labels = [a for a, _ in node.actions]
            if len(set(labels)) != len(labels):
                out.append(Violation("duplicate-label", i, f"node {i} repeats an action label"))
        elif isinstance(node, Concurrent):
            if not node.rows or not node.cols:
                out.append(Violation("no-actions", i, f"node {i} has an empty action set"))
            if len(node.cells) != len(node.rows) * len(node.cols):
                out.append(Violation("cells", i, f"node {i} has {len(node.cells)} cells, "
                                     f"expected {len(node.rows) * len(node.cols)}"))
            if len(set(node.rows)) != len(node.rows) or len(set(node.cols)) != len(node.cols):
                out.append(Violation("duplicate-label", i, f"node {i} repeats an action label"))
        elif isinstance(node, Chance):
            if not node.branches:
                out.append(Violation("no-actions", i, f"chance node {i} has no branches"))
            if any(p < 0 or p > 1 for p, _ in node.branches):
                out.append(Violation("chance-range", i, f"chance node {i} has a probability "
                                     "outside [0, 1]"))
            total = sum((p for p, _ in node.branches), Fraction(0))
            if total != 1:
                out.append(Violation("chance-sum", i, f"chance sum != 1 at node {i} "
                                     f"(sums to {total})"))
    if any(v.kind == "dangling" for v in out):
        return ValidationReport(tuple(out))

    # cycles: iterative three-colour DFS over everything
    colour = [0] * n
    for start in range(n):
        if colour[start]:
            continue
        stack = [(start, iter(children(game.nodes[start])))]
        colour[start] = 1
        while stack:
            node_id, it = stack[-1]
            advanced = False
            for c in it:
                if colour[c] == 1:
                    out.append(Violation("cycle", c, f"cycle through node {c} "
                                         f"(reached again from node {node_id})"))
                elif colour[c] == 0:
                    colour[c] = 1
                    stack.append((c, iter(children(game.nodes[c]))))
                    advanced = True
                    break
            if not advanced:
                colour[node_id] = 2
                stack.pop()

    reach = game.reachable()
    for i in range(n):
        if i not in reach:
            out.append(Violation("orphan", i, f"node {i} is unreachable from the root"))

    parents = game.parents()
    if parents[game.root]:
        out.append(Violation("root-parent", game.root, "root has a parent"))
    if game.graph == "tree":
        for i in range(n):
            if len(parents[i]) > 1:
                out.append(Violation("multi-parent", i, f"node {i} has parents {parents[i]} "
                                     "in a game declared as a tree"))
        for i, node in enumerate(game.nodes):
            ch = children(node)
            if len(set(ch)) != len(ch):
                out.append(Violation("multi-parent", i, f"node {i} reaches the same child "
                                     "twice in a game declared as a tree"))
    return ValidationReport(tuple(out))


def require_valid(game: Game) -> None:
    report = validate(game)
    if not report.ok:
        raise GameError("invalid game: " + "; ".join(v.message for v in report.violations))


@dataclass(frozen=True)
class GameClass:
    graph: str      # "tree" | "dag"
    info: str       # "turn-based" | "concurrent"
    chance: bool


def classify(game: Game) -> GameClass:
    require_valid(game)
    parents = game.parents()
    shared = any(len(p) > 1 for p in parents.values()) or any(
        len(set(children(nd))) != len(children(nd)) for nd in game.nodes
    )
    concurrent = any(isinstance(nd, Concurrent) for nd in game.nodes)
    chance = any(isinstance(nd, Chance) for nd in game.nodes)
    return GameClass(
        graph="dag" if shared else "tree",
        info="concurrent" if concurrent else "turn-based",
        chance=chance,
    )


# --------------------------------------------------------------------------
# strategies


@dataclass(frozen=True)
class PureStrategy:
    player: str
    choice: Mapping[int, str] = field(default_factory=dict)

    def to_behavioral(self) -> "BehavioralStrategy":
        return BehavioralStrategy(self.player, {s: {a: Fraction(1)} for s, a in self.choice.items()})


@dataclass(frozen=True)
class BehavioralStrategy:
    player: str
    mix: Mapping[int, Mapping[str, Fraction]] = field(default_factory=dict)

    def prob(self, node: int, label: str) -> Fraction:
        return self.mix[node].get(label, Fraction(0))

    def support(self, node: int) -> list[str]:
        return [a for a, p in self.mix[node].items() if p > 0]


def player_nodes(game: Game, player: str) -> list[int]:
    """Nodes where ``player`` chooses an action (concurrent nodes count for both)."""
    own = Leader if player == LEADER else Follower
    return [i for i, nd in enumerate(game.nodes) if isinstance(nd, (own, Concurrent))]


def action_labels(node: Node, player: str) -> tuple[str, ...]:
    if isinstance(node, (Leader, Follower)):
        return tuple(a for a, _ in node.actions)
    if isinstance(node, Concurrent):
        return node.rows if player == LEADER else node.cols
    return ()


def check_strategy(game: Game, strategy: BehavioralStrategy, nodes=None) -> None:
    for s in player_nodes(game, strategy.player) if nodes is None else nodes:
        if s not in strategy.mix:
            raise StrategyError(f"{strategy.player} strategy has no entry for node {s}", s)
        labels = action_labels(game.nodes[s], strategy.player)
        dist = strategy.mix[s]
        bad = set(dist) - set(labels)
        if bad:
            raise StrategyError(f"unknown action(s) {sorted(bad)} at node {s}", s)
        if any(p < 0 or p > 1 for p in dist.values()):
            raise StrategyError(f"probability outside [0, 1] at node {s}", s)
        if sum(dist.values(), Fraction(0)) != 1:
            raise StrategyError(f"distribution at node {s} does not sum to 1", s)


def transitions(game: Game, node_id: int, s1: BehavioralStrategy,
                s2: BehavioralStrategy) -> list[tuple[Fraction, int]]:
    """Outgoing (probability, child) pairs at a node under a behavioral profile."""
    node = game.nodes[node_id]
    if isinstance(node, Leader):
        return [(s1.prob(node_id, a), c) for a, c in node.actions]
    if isinstance(node, Follower):
        return [(s2.prob(node_id, a), c) for a, c in node.actions]
    if isinstance(node, Concurrent):
        return [(s1.prob(node_id, r) * s2.prob(node_id, col), c) for r, col, c in node.grid()]
    if isinstance(node, Chance):
        return list(node.branches)
    return []


def reach_probabilities(game: Game, s1: BehavioralStrategy, s2: BehavioralStrategy,
                        start: int | None = None) -> dict[int, Fraction]:
    """Probability of visiting each node from ``start`` (memoryless on DAGs)."""
    start = game.root if start is None else start
    sub = game.reachable(start)
    order = [i for i in game.topological_order() if i in sub]
    prob = {i: Fraction(0) for i in sub}
    prob[start] = Fraction(1)
    for i in order:
        if prob[i] == 0:
            continue
        node = game.nodes[i]
        if isinstance(node, DECISION_KINDS):
            for player, strat in ((LEADER, s1), (FOLLOWER, s2)):
                if i in player_nodes(game, player) and i not in strat.mix:
                    raise StrategyError(f"{player} strategy has no entry for node {i}", i)
        for p, c in transitions(game, i, s1, s2):
            if p:
                prob[c] += prob[i] * p
    return prob


def evaluate_profile(game: Game, s1: BehavioralStrategy, s2: BehavioralStrategy,
                     start: int | None = None):
    """Expected utilities and leaf distribution of a behavioral profile.

    Returns ``(u1, u2, leaf_probs)``. ``start`` evaluates the subgame at that node.
    """
    check_strategy(game, s1)
    check_strategy(game, s2)
    prob = reach_probabilities(game, s1, s2, start)
    leaf_probs = {i: p for i, p in prob.items() if isinstance(game.nodes[i], Leaf)}
    u1 = sum((p * game.nodes[z].u1 for z, p in leaf_probs.items()), Fraction(0))
    u2 = sum((p * game.nodes[z].u2 for z, p in leaf_probs.items()), Fraction(0))
    return u1, u2, leaf_probs


def subtree_values(game: Game, s1: BehavioralStrategy, s2: BehavioralStrategy,
                   transition=None) -> dict[int, tuple[Fraction, Fraction]]:
    """Expected ``(u1, u2)`` of the subgame at every node, by backward induction.

    ``transition(node_id)`` may override the outgoing distribution (used for
    correlated concurrent cells).
    """
    out: dict[int, tuple[Fraction, Fraction]] = {}
    for i in reversed(game.topological_order()):
        node = game.nodes[i]
        if isinstance(node, Leaf):
            out[i] = (node.u1, node.u2)
            continue
        edges = transition(i) if transition else None
        if edges is None:
            edges = transitions(game, i, s1, s2)
        a = b = Fraction(0)
        for p, c in edges:
            if p:
                a += p * out[c][0]
                b += p * out[c][1]
        out[i] = (a, b)
    return out


def leader_favoring_response(game: Game, s1: BehavioralStrategy) -> tuple[PureStrategy, dict]:
    """Follower pure best response to a leader behavioral strategy.

    Backward induction maximising follower utility, ties broken toward the
    larger leader utility, then the first-listed action. Concurrent nodes are
    answered with a pure column. Returns the response and the per-node
    ``(u1, u2)`` values it induces.
    """
    choice: dict[int, str] = {}
    val: dict[int, tuple[Fraction, Fraction]] = {}
    for i in reversed(game.topological_order()):
        node = game.nodes[i]
        if isinstance(node, Leaf):
            val[i] = (node.u1, node.u2)
        elif isinstance(node, Leader):
            val[i] = _mix_values([(s1.prob(i, a), val[c]) for a, c in node.actions])
        elif isinstance(node, Chance):
            val[i] = _mix_values([(p, val[c]) for p, c in node.branches])
        elif isinstance(node, Follower):
            best = None
            for a, c in node.actions:
                key = (val[c][1], val[c][0])
                if best is None or key > best[0]:
                    best = (key, a, val[c])
            choice[i] = best[1]
            val[i] = best[2]
        else:
            best = None
            for col in node.cols:
                v = _mix_values([(s1.prob(i, r), val[node.child(r, col)]) for r in node.rows])
                key = (v[1], v[0])
                if best is None or key > best[0]:
                    best = (key, col, v)
            choice[i] = best[1]
            val[i] = best[2]
    return PureStrategy(FOLLOWER, choice), val


def _mix_values(parts) -> tuple[Fraction, Fraction]:
    a = b = Fraction(0)
    for p, (x, y) in parts:
        if p:
            a += p * x
            b += p * y
    return a, b


def follower_best_value(game: Game, s1: BehavioralStrategy) -> dict[int, Fraction]:
    """Follower's optimal continuation value at every node against ``s1``."""
    _, val = leader_favoring_response(game, s1)
    return {i: v[1] for i, v in val.items()}
