"""Approximate leader commitment on turn-based trees with chance.

Leader utilities are shifted to start at 0 and discretised in steps of
``D = epsilon / H`` (H = tree height after binarisation). Each node keeps a
tradeoff table: entry k is the best follower utility the leader can offer
while securing scaled leader utility at least k, or -inf when that is
impossible. Tables are combined bottom-up on the binarised tree and the
stored argmax witnesses rebuild the leader's strategy.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass, field

from gmpy2 import mpq

from .game import (LEADER, BehavioralStrategy, Chance, Concurrent, Follower, Game, GameError,
                   Leader, Leaf, PureStrategy, classify, leader_favoring_response, require_valid)
from .minmax import compute_minmax
from .numeric import NEG_INF, Fraction, to_fraction

REST = "~rest"


# --------------------------------------------------------------------------
# binarisation


@dataclass(frozen=True)
class Binarized:
    game: Game
    chains: dict[int, list[int]]   # original decision node -> chain node ids (top first)
    entry: dict[int, int]          # original node -> binarised node standing for it


def binarize_with_map(game: Game) -> Binarized:
    """Binary tree with the same outcomes, plus the node correspondence.

    k-ary nodes become right-leaning chains of same-owner binary nodes; chance
    chains use conditional probabilities. Zero-probability branches are
    dropped and nodes left with a single child are contracted into it.
    """
    require_valid(game)
    if classify(game).graph != "tree":
        raise GameError("binarisation needs a tree")
    nodes: list = []
    chains: dict[int, list[int]] = {}
    entry: dict[int, int] = {}

    def reserve() -> int:
        nodes.append(None)
        return len(nodes) - 1

    def build(s: int, slot: int | None = None) -> int:
        node = game.nodes[s]
        if isinstance(node, Concurrent):
            raise GameError(f"node {s} is concurrent; the approximation schemes are turn-based")
        if isinstance(node, Leaf):
            i = reserve() if slot is None else slot
            nodes[i] = node
            entry[s] = i
            return i
        if isinstance(node, Chance):
            items = [(p, c) for p, c in node.branches if p]
        else:
            items = list(node.actions)
        if len(items) == 1:
            chains[s] = []
            i = build(items[0][1], slot)
            entry[s] = i
            return i
        ids = [reserve() if slot is None else slot]
        entry[s] = ids[0]
        remaining = Fraction(1)
        for t in range(len(items) - 1):
            me = ids[-1]
            left = build(items[t][1])
            if t == len(items) - 2:
                right = build(items[-1][1])
            else:
                right = reserve()
                ids.append(right)
            if isinstance(node, Chance):
                p = items[t][0] / remaining
                remaining -= items[t][0]
                nodes[me] = Chance(((p, left), (1 - p, right)))
            else:
                right_label = items[-1][0] if t == len(items) - 2 else REST
                nodes[me] = type(node)(((items[t][0], left), (right_label, right)))
        chains[s] = ids
        return ids[0]

    build(game.root, reserve())
    return Binarized(Game(tuple(nodes), root=0, graph="tree"), chains, entry)


def binarize(game: Game) -> Game:
    return binarize_with_map(game).game


def unbinarize_leader(game: Game, b: Binarized, mix_b) -> BehavioralStrategy:
    """Map a leader strategy on the binarised tree back to the original game."""
    out: dict[int, dict[str, Fraction]] = {}
    for s, node in enumerate(game.nodes):
        if not isinstance(node, Leader):
            continue
        chain = b.chains[s]
        if not chain:
            out[s] = {node.actions[0][0]: Fraction(1)}
            continue
        mix: dict[str, Fraction] = {}
        carry = Fraction(1)
        labels = [a for a, _ in node.actions]
        for t, cid in enumerate(chain):
            local = mix_b[cid]
            left = local.get(labels[t], Fraction(0))
            if left:
                mix[labels[t]] = mix.get(labels[t], Fraction(0)) + carry * left
            right_label = labels[-1] if t == len(chain) - 1 else REST
            carry *= local.get(right_label, Fraction(0))
        if carry:
            mix[labels[-1]] = mix.get(labels[-1], Fraction(0)) + carry
        out[s] = mix
    return BehavioralStrategy(LEADER, out)


# --------------------------------------------------------------------------
# tables


@dataclass(frozen=True)
class FptasParams:
    epsilon: Fraction
    U: Fraction
    H_T: int
    D: Fraction
    n: int
    shift: Fraction = Fraction(0)

    def index(self, u1) -> int:
        return math.floor((to_fraction(u1) - self.shift) / self.D)

    def unscale(self, k: int) -> Fraction:
        return self.shift + k * self.D


@dataclass(frozen=True)
class TradeoffTable:
    entries: tuple

    def __len__(self):
        return len(self.entries)

    def last_finite(self) -> int:
        """Largest k with a finite entry (-1 if none)."""
        for k in range(len(self.entries) - 1, -1, -1):
            if self.entries[k] is not NEG_INF:
                return k
        return -1

    def is_monotone(self) -> bool:
        e = self.entries
        return all(e[k] >= e[k + 1] for k in range(len(e) - 1))


@dataclass
class ApproxSolution:
    strategy: object                 # BehavioralStrategy or PureStrategy on the original game
    guaranteed_value: Fraction
    root_table: TradeoffTable
    params: FptasParams
    binarized: Binarized
    tables: Mapping = field(default_factory=dict)   # binarised node -> TradeoffTable
    witnesses: dict = field(default_factory=dict)   # binarised node -> per-k witness
    mode: str = "behavioral"

    def substrategy(self, node: int, k: int) -> BehavioralStrategy:
        """Leader strategy on the binarised tree realising entry k at ``node``."""
        return _reconstruct(self.binarized.game, self.witnesses, self.mode, node, k,
                            compute_minmax(self.binarized.game))


def _params(game: Game, epsilon) -> FptasParams:
    eps = to_fraction(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    u1 = [game.nodes[z].u1 for z in game.leaves()]
    lo = min(u1)
    U = max(u1) - lo
    H = max(1, game.height())
    return FptasParams(eps, U, H, eps / H, math.ceil(H * U / eps) + 1, lo)


def _last(table) -> int:
    k = len(table) - 1
    while k >= 0 and table[k] is None:
        k -= 1
    return k


def _bridges(P, Q, n):
    """Best mix with P at index i > k and Q at index j < k hitting exactly k.

    Returns per-k ``(value, i, j)`` or None. The optimum is the upper hull of
    the two point sets evaluated at x = k, found on persistent prefix/suffix
    upper hulls.
    """
    out = [None] * n
    maxP, maxQ = _last(P), _last(Q)
    if maxP < 2 or maxQ < 0:
        return out
    prv = [-1] * (maxQ + 1)
    for j in range(1, maxQ + 1):
        t = j - 1
        while prv[t] >= 0 and _turn(prv[t], Q[prv[t]], t, Q[t], j, Q[j]) >= 0:
            t = prv[t]
        prv[j] = t
    nxt = [-1] * (maxP + 2)
    for i in range(maxP - 1, 0, -1):
        t = i + 1
        while nxt[t] >= 0 and _turn(i, P[i], t, P[t], nxt[t], P[nxt[t]]) >= 0:
            t = nxt[t]
        nxt[i] = t
    for k in range(1, maxP):
        l, r = min(k - 1, maxQ), k + 1
        moved = True
        while moved:
            moved = False
            while prv[l] >= 0 and _turn(prv[l], Q[prv[l]], l, Q[l], r, P[r]) >= 0:
                l = prv[l]
                moved = True
            while nxt[r] >= 0 and _turn(l, Q[l], r, P[r], nxt[r], P[nxt[r]]) >= 0:
                r = nxt[r]
                moved = True
        value = Q[l] + (P[r] - Q[l]) * (k - l) / (r - l)
        out[k] = (value, r, l)
    return out


def _turn(x0, y0, x1, y1, x2, y2):
    return (x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0)


def _leaf_table(idx: int, u2, n: int):
    return [u2 if k <= idx else None for k in range(n)], None


def _follower_table(A_L, A_R, mu_L, mu_R, n):
    table, wit = [None] * n, [None] * n
    for k in range(n):
        best = None
        a, b = A_L[k], A_R[k]
        if a is not None and a >= mu_R:
            best, w = a, 0
        if b is not None and b >= mu_L and (best is None or b > best):
            best, w = b, 1
        if best is not None:
            table[k], wit[k] = best, w
    return table, wit


def _pure_leader_table(A_L, A_R, n):
    table, wit = [None] * n, [None] * n
    for k in range(n):
        a, b = A_L[k], A_R[k]
        if a is not None and (b is None or a >= b):
            table[k], wit[k] = a, 0
        elif b is not None:
            table[k], wit[k] = b, 1
    return table, wit


def _linear_runs(table, last):
    """``out[i]`` is the largest h with ``table[i..h]`` collinear."""
    out = list(range(last + 1))
    for i in range(last - 2, -1, -1):
        if table[i + 1] - table[i] == table[i + 2] - table[i + 1]:
            out[i] = out[i + 1]
        else:
            out[i] = i + 1
    return out


def _chance_table(A_L, A_R, p, n):
    """Entry k maximises p*A_L[i] + q*A_R[j] over p*i + q*j >= k.

    For fixed k the smallest feasible j falls as i grows, so the first term
    falls and the second rises along i. That gives every interval of i an
    upper bound, and a branch-and-bound search finds the exact optimum
    without scanning all pairs. Where both tables are linear over the
    interval the objective is linear on each residue class of i modulo the
    denominator of q, so only the ends of each class need checking.
    """
    q = 1 - p
    a, c = int(p.numerator), int(p.denominator)
    b = c - a
    last_L, last_R = _last(A_L), _last(A_R)
    table, wit = [None] * n, [None] * n
    if last_L < 0 or last_R < 0:
        return table, wit
    run_L, run_R = _linear_runs(A_L, last_L), _linear_runs(A_R, last_R)

    for k in range(n):
        def need(i):   # smallest j with p*i + q*j >= k
            return max(0, -((a * i - c * k) // b))

        best, arg = None, None

        def visit(i):
            nonlocal best, arg
            j = need(i)
            if j > last_R:
                return
            v = p * A_L[i] + q * A_R[j]
            if best is None or v > best or (v == best and i < arg):
                best, arg = v, i

        if k:
            visit(wit[k - 1][0])
        stack = [(0, last_L)]
        while stack:
            lo, hi = stack.pop()
            j_hi = need(hi)
            if j_hi > last_R:
                continue
            if best is not None and p * A_L[lo] + q * A_R[j_hi] <= best:
                continue
            j_lo = need(lo)
            if hi - lo < 2 * b + 2:
                for i in range(lo, hi + 1):
                    visit(i)
            elif run_L[lo] >= hi and j_lo <= last_R and run_R[j_hi] >= j_lo:
                flat = -(-c * k // a)   # first i needing no j at all
                top = min(hi, flat - 1)
                for i in range(lo, min(lo + b, top + 1)):
                    visit(i)
                for i in range(max(lo, top - b + 1), top + 1):
                    visit(i)
                if flat <= hi:
                    visit(max(lo, flat))
            else:
                mid = (lo + hi) // 2
                stack += [(mid + 1, hi), (lo, mid)]
        if best is None:
            break
        table[k], wit[k] = best, (arg, need(arg))
    return table, wit


def _behavioral_leader_table(A_L, A_R, n):
    table, wit = _pure_leader_table(A_L, A_R, n)
    wit = [None if w is None else ((Fraction(1), k, k) if w == 0 else (Fraction(0), k, k))
           for k, w in enumerate(wit)]
    lr = _bridges(A_L, A_R, n)   # L above k, R below
    rl = _bridges(A_R, A_L, n)   # R above k, L below
    for k in range(n):
        if lr[k] is not None and (table[k] is None or lr[k][0] > table[k]):
            v, i, j = lr[k]
            table[k], wit[k] = v, (Fraction(k - j, i - j), i, j)
        if rl[k] is not None and (table[k] is None or rl[k][0] > table[k]):
            v, i, j = rl[k]
            pr = Fraction(k - j, i - j)
            table[k], wit[k] = v, (1 - pr, j, i)
    return table, wit


def _run(game: Game, epsilon, mode: str) -> ApproxSolution:
    b = binarize_with_map(game)
    g = b.game
    params = _params(g, epsilon)
    n = params.n
    mm = compute_minmax(g)
    mu = mm.mu
    raw: dict[int, list] = {}
    witnesses: dict[int, list] = {}
    for s in reversed(g.topological_order()):
        node = g.nodes[s]
        if isinstance(node, Leaf):
            raw[s], witnesses[s] = _leaf_table(params.index(node.u1), mpq(node.u2), n)
            continue
        if isinstance(node, Chance):
            (p, cl), (_, cr) = node.branches
            raw[s], witnesses[s] = _chance_table(raw[cl], raw[cr], mpq(p), n)
            continue
        (_, cl), (_, cr) = node.actions
        if isinstance(node, Follower):
            raw[s], witnesses[s] = _follower_table(raw[cl], raw[cr], mpq(mu[cl]), mpq(mu[cr]), n)
        elif mode == "pure":
            raw[s], witnesses[s] = _pure_leader_table(raw[cl], raw[cr], n)
        else:
            raw[s], witnesses[s] = _behavioral_leader_table(raw[cl], raw[cr], n)
    tables = _Tables(raw)
    root = g.root
    top = _last(raw[root])
    if top < 0:
        raise ArithmeticError("root table has no finite entry; the leader can always "
                              "secure the minimum utility")
    mix_b = _reconstruct(g, witnesses, mode, root, top, mm).mix
    strategy = unbinarize_leader(game, b, mix_b)
    if mode == "pure":
        strategy = PureStrategy(LEADER, {s: max(m, key=m.get) for s, m in strategy.mix.items()})
    return ApproxSolution(strategy, params.unscale(top), tables[root], params, b,
                          tables, witnesses, mode)


class _Tables(Mapping):
    """Working tables exposed as TradeoffTables, converted on first access."""

    def __init__(self, raw):
        self._raw, self._done = raw, {}

    def __getitem__(self, s):
        if s not in self._done:
            self._done[s] = TradeoffTable(tuple(NEG_INF if v is None else _exact(v)
                                                for v in self._raw[s]))
        return self._done[s]

    def __iter__(self):
        return iter(self._raw)

    def __len__(self):
        return len(self._raw)


def _exact(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def _reconstruct(g: Game, witnesses, mode: str, start: int, k: int, mm) -> BehavioralStrategy:
    mix: dict[int, dict[str, Fraction]] = {}
    stack = [(start, k)]
    while stack:
        s, k = stack.pop()
        node = g.nodes[s]
        w = witnesses[s][k] if witnesses[s] is not None else None
        if isinstance(node, Leaf):
            continue
        if isinstance(node, Chance):
            (_, cl), (_, cr) = node.branches
            stack += [(cl, w[0]), (cr, w[1])]
            continue
        (al, cl), (ar, cr) = node.actions
        if isinstance(node, Follower):
            stack.append((cl, k) if w == 0 else (cr, k))
        elif mode == "pure":
            mix[s] = {al: Fraction(1)} if w == 0 else {ar: Fraction(1)}
            stack.append((cl, k) if w == 0 else (cr, k))
        else:
            pl, i, j = w
            mix[s] = {a: p for a, p in ((al, pl), (ar, 1 - pl)) if p}
            if pl:
                stack.append((cl, i))
            if pl != 1:
                stack.append((cr, j))
    for s, node in enumerate(g.nodes):
        if isinstance(node, Leader) and s not in mix:
            mix[s] = dict(mm.punish_leader.mix[s])
    return BehavioralStrategy(LEADER, mix)


def fptas_behavioral(game: Game, epsilon) -> ApproxSolution:
    """Behavioral commitment within ``epsilon`` of optimal."""
    return _run(game, epsilon, "behavioral")


def fptas_pure(game: Game, epsilon) -> ApproxSolution:
    """Pure commitment within ``epsilon`` of optimal."""
    return _run(game, epsilon, "pure")


def replay_value(game: Game, sol: ApproxSolution) -> tuple[Fraction, Fraction]:
    """Exact (leader, follower) utility of the returned strategy against a
    leader-favoring best response."""
    s1 = sol.strategy
    if isinstance(s1, PureStrategy):
        s1 = s1.to_behavioral()
    _, val = leader_favoring_response(game, s1)
    return val[game.root]
