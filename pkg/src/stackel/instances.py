"""Instance corpus: worked example, knapsack reduction games, random games."""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass

from .game import Chance, Concurrent, Follower, Game, Leader, Leaf, require_valid
from .numeric import Fraction

PLUS, MINUS = "plus", "minus"


# --------------------------------------------------------------------------
# knapsack


@dataclass(frozen=True)
class KnapsackInstance:
    weights: tuple[int, ...]
    values: tuple[int, ...]
    budget: int
    target: int = 0

    def __post_init__(self):
        if len(self.weights) != len(self.values):
            raise ValueError("weights and values must have the same length")
        if any(w <= 0 for w in self.weights) or any(v <= 0 for v in self.values):
            raise ValueError("item weights and values must be positive integers")
        if self.budget < 0:
            raise ValueError("budget must be non-negative")

    @property
    def size(self) -> int:
        return len(self.weights)


@dataclass(frozen=True)
class UnitItemsInstance(KnapsackInstance):
    """Knapsack instance with at least ``budget`` items of weight 1 and value 1."""

    def __post_init__(self):
        super().__post_init__()
        units = sum(1 for w, v in zip(self.weights, self.values) if w == 1 and v == 1)
        if units < self.budget:
            raise ValueError(f"needs at least {self.budget} unit items, found {units}")


def knapsack_optimum(k: KnapsackInstance) -> tuple[int, tuple[int, ...]]:
    """Best value and a best item subset, by subset enumeration."""
    best = (0, ())
    for r in range(k.size + 1):
        for subset in itertools.combinations(range(k.size), r):
            if sum(k.weights[i] for i in subset) <= k.budget:
                val = sum(k.values[i] for i in subset)
                if val > best[0]:
                    best = (val, subset)
    return best


def knapsack_to_unit_items(k: KnapsackInstance) -> UnitItemsInstance:
    scale = k.budget + 1
    return UnitItemsInstance(
        tuple(k.weights) + (1,) * k.budget,
        tuple(scale * v for v in k.values) + (1,) * k.budget,
        k.budget,
        scale * k.target,
    )


def reduction_big_m(u: KnapsackInstance) -> int:
    n, W = u.size, u.budget
    return max(max(W * n * v, n * w) for w, v in zip(u.weights, u.values)) + 1


def gen_knapsack_reduction(u: KnapsackInstance) -> Game:
    """Concurrent-move game whose behavioral commitment value is the knapsack optimum.

    Plain knapsack instances are converted to the unit-items form first.
    """
    if not isinstance(u, UnitItemsInstance):
        u = knapsack_to_unit_items(u)
    n, W = u.size, u.budget
    if n == 0:
        raise ValueError("reduction needs at least one item")
    M = reduction_big_m(u)
    nodes: list = [None]
    rows = tuple(f"l{i + 1}" for i in range(n))
    cols = tuple(f"f{j}" for j in range(n + 1))
    cells = []

    def add(node) -> int:
        nodes.append(node)
        return len(nodes) - 1

    subgames = []
    for i in range(n):
        row_cells = []
        for j in range(n + 1):
            if j == 0:
                idx = add(None)
                subgames.append(idx)
                row_cells.append(idx)
            elif j == i + 1:
                row_cells.append(add(Leaf(0, n * M - W - M)))
            else:
                row_cells.append(add(Leaf(0, -W - M)))
        cells.extend(row_cells)
    nodes[0] = Concurrent(rows, cols, tuple(cells))
    for i, idx in enumerate(subgames):
        nv, nw = n * u.values[i], n * u.weights[i]
        kids = [add(Leaf(nv, -nw)), add(Leaf(0, -nw)), add(Leaf(nv, -nw)), add(Leaf(0, 0))]
        nodes[idx] = Concurrent((PLUS, MINUS), ("L", "R"), tuple(kids))
    return _relabel_bfs(nodes, 0, "tree")


def example_fig1() -> Game:
    """Two follower nodes above two leader nodes.

    A reconstruction matching the worked example's numbers: behavioral
    commitment value 1 and correlated value 3/2 at (u2, u1) = (2, 3/2).
    """
    return Game((
        Follower((("left", 1), ("right", 2))),
        Follower((("left", 3), ("right", 4))),
        Leaf(0, 2),
        Leader((("left", 5), ("right", 6))),
        Leader((("left", 7), ("right", 8))),
        Leaf(4, 0),
        Leaf(0, 2),
        Leaf(0, 1),
        Leaf(1, 3),
    ))


# --------------------------------------------------------------------------
# random games


@dataclass(frozen=True)
class GenParams:
    """Random game shape.

    ``node_count`` is the number of internal (non-leaf) nodes; each gets
    between 2 and ``branching`` children. Leaf utilities are integers in
    ``[-utility_range, utility_range]``. ``info`` is ``"turn-based"`` or
    ``"concurrent"``; the latter guarantees at least one concurrent node.
    In DAG mode, ``share_fraction`` of internal nodes gain an extra action
    into the next depth layer.
    """

    seed: int = 0
    node_count: int = 6
    branching: int = 2
    chance_fraction: Fraction = Fraction(0)
    concurrent_fraction: Fraction = Fraction(0)
    utility_range: int = 5
    graph: str = "tree"
    info: str = "turn-based"
    share_fraction: Fraction = Fraction(1, 2)

    def check(self) -> None:
        if self.graph not in ("tree", "dag"):
            raise ValueError(f"graph must be 'tree' or 'dag', got {self.graph!r}")
        if self.info not in ("turn-based", "concurrent"):
            raise ValueError(f"info must be 'turn-based' or 'concurrent', got {self.info!r}")
        if self.node_count < 0 or self.branching < 2 or self.utility_range < 0:
            raise ValueError("need node_count >= 0, branching >= 2, utility_range >= 0")
        fracs = (Fraction(self.chance_fraction), Fraction(self.concurrent_fraction),
                 Fraction(self.share_fraction))
        if any(f < 0 or f > 1 for f in fracs) or fracs[0] + fracs[1] > 1:
            raise ValueError("fractions must lie in [0, 1] and chance + concurrent <= 1")
        if self.info == "turn-based" and self.concurrent_fraction > 0:
            raise ValueError("concurrent_fraction > 0 contradicts info='turn-based'")
        if self.info == "concurrent" and self.node_count == 0:
            raise ValueError("a concurrent game needs at least one internal node")


def _relabel_bfs(nodes, root, graph) -> Game:
    """Renumber nodes in breadth-first order from ``root`` (children in listed order)."""
    order, seen = [], {root}
    queue = deque([root])
    while queue:
        i = queue.popleft()
        order.append(i)
        for c in _kids(nodes[i]):
            if c not in seen:
                seen.add(c)
                queue.append(c)
    new = {old: k for k, old in enumerate(order)}
    out = []
    for old in order:
        nd = nodes[old]
        if isinstance(nd, Leader):
            nd = Leader(tuple((a, new[c]) for a, c in nd.actions))
        elif isinstance(nd, Follower):
            nd = Follower(tuple((a, new[c]) for a, c in nd.actions))
        elif isinstance(nd, Concurrent):
            nd = Concurrent(nd.rows, nd.cols, tuple(new[c] for c in nd.cells))
        elif isinstance(nd, Chance):
            nd = Chance(tuple((p, new[c]) for p, c in nd.branches))
        out.append(nd)
    return Game(tuple(out), root=0, graph=graph)


def _kids(nd) -> list[int]:
    if isinstance(nd, (Leader, Follower)):
        return [c for _, c in nd.actions]
    if isinstance(nd, Concurrent):
        return list(nd.cells)
    if isinstance(nd, Chance):
        return [c for _, c in nd.branches]
    return []


def _chance_weights(rng: random.Random, k: int) -> tuple[Fraction, ...]:
    raw = [rng.randint(1, 4) for _ in range(k)]
    total = sum(raw)
    return tuple(Fraction(r, total) for r in raw)


def gen_random(p: GenParams) -> Game:
    """Seed-deterministic random game; the result always validates."""
    p.check()
    rng = random.Random(p.seed)
    R = p.utility_range

    def leaf():
        return Leaf(rng.randint(-R, R), rng.randint(-R, R))

    if p.node_count == 0:
        return Game((leaf(),))

    # shape: grow internal nodes by expanding random open slots
    kinds: dict[int, str] = {}
    arity: dict[int, tuple] = {}
    child_of: dict[int, list[int]] = {}
    depth = {0: 0}
    open_slots = [0]
    next_id = 1
    concurrent_needed = p.info == "concurrent"
    for made in range(p.node_count):
        slot = open_slots.pop(rng.randrange(len(open_slots)))
        r = Fraction(rng.random()).limit_denominator(10 ** 6)
        left = p.node_count - made
        if concurrent_needed and left == 1 and "concurrent" not in kinds.values():
            kind = "concurrent"
        elif r < p.chance_fraction:
            kind = "chance"
        elif r < p.chance_fraction + p.concurrent_fraction:
            kind = "concurrent"
        else:
            kind = rng.choice(("leader", "follower"))
        if kind == "concurrent":
            top = min(p.branching, 3)
            rows = rng.randint(1, top)
            cols = rng.randint(2 if rows == 1 else 1, top)
            arity[slot] = (rows, cols)
            k = rows * cols
        else:
            k = rng.randint(2, p.branching)
        kinds[slot] = kind
        kids = list(range(next_id, next_id + k))
        next_id += k
        child_of[slot] = kids
        for c in kids:
            depth[c] = depth[slot] + 1
        open_slots.extend(kids)

    nodes: list = [None] * next_id
    for i in range(next_id):
        kind = kinds.get(i)
        kids = child_of.get(i, [])
        if kind is None:
            nodes[i] = leaf()
        elif kind == "leader":
            nodes[i] = Leader(tuple((f"a{j}", c) for j, c in enumerate(kids)))
        elif kind == "follower":
            nodes[i] = Follower(tuple((f"b{j}", c) for j, c in enumerate(kids)))
        elif kind == "chance":
            nodes[i] = Chance(tuple(zip(_chance_weights(rng, len(kids)), kids)))
        else:
            rows, cols = arity[i]
            nodes[i] = Concurrent(tuple(f"r{j}" for j in range(rows)),
                                  tuple(f"c{j}" for j in range(cols)), tuple(kids))

    if p.graph == "dag":
        by_depth: dict[int, list[int]] = {}
        for i, d in depth.items():
            by_depth.setdefault(d, []).append(i)
        for i in sorted(kinds):
            nd = nodes[i]
            if not isinstance(nd, (Leader, Follower)):
                continue
            pool = [c for c in by_depth.get(depth[i] + 1, []) if c not in child_of[i]]
            if pool and Fraction(rng.random()).limit_denominator(10 ** 6) < p.share_fraction:
                extra = rng.choice(pool)
                label = ("a" if isinstance(nd, Leader) else "b") + str(len(nd.actions))
                nodes[i] = type(nd)(nd.actions + ((label, extra),))
    game = _relabel_bfs(nodes, 0, p.graph)
    require_valid(game)
    return game


def gen_balanced(depth: int, branching: int, seed: int = 0, utility_range: int = 100) -> Game:
    """Complete turn-based tree, leader at even depths and follower at odd ones.

    Has ``branching ** depth`` leaves with seeded integer utilities in
    ``[-utility_range, utility_range]``.
    """
    if depth < 0 or branching < 1:
        raise ValueError("need depth >= 0 and branching >= 1")
    rng = random.Random(seed)
    nodes: list = []
    level = [0]
    nodes.append(None)
    for d in range(depth):
        nxt = []
        for i in level:
            kids = list(range(len(nodes), len(nodes) + branching))
            nodes.extend([None] * branching)
            kind = Leader if d % 2 == 0 else Follower
            nodes[i] = kind(tuple((f"{'a' if kind is Leader else 'b'}{j}", c)
                                  for j, c in enumerate(kids)))
            nxt.extend(kids)
        level = nxt
    R = utility_range
    for i in level:
        nodes[i] = Leaf(rng.randint(-R, R), rng.randint(-R, R))
    return Game(tuple(nodes))
