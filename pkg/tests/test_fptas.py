import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from stackel import (Chance, Follower, Game, Leader, Leaf, brute_force_pure_stackelberg,
                     fptas_behavioral, fptas_pure, grid_behavioral_stackelberg, replay_value)
from stackel.fptas import REST, _chance_table, binarize, binarize_with_map
from stackel.game import leader_favoring_response
from stackel.numeric import NEG_INF

from conftest import random_trees


def test_binary_tree_unchanged(threat_game):
    assert binarize(threat_game).nodes == threat_game.nodes


def test_chance_chain_probabilities():
    g = Game((Chance(((Fraction(1, 2), 1), (Fraction(1, 3), 2), (Fraction(1, 6), 3))),
              Leaf(1, 0), Leaf(2, 0), Leaf(3, 0)))
    b = binarize(g)
    top = b.nodes[0]
    assert [p for p, _ in top.branches] == [Fraction(1, 2), Fraction(1, 2)]
    inner = b.nodes[top.branches[1][1]]
    assert [p for p, _ in inner.branches] == [Fraction(2, 3), Fraction(1, 3)]


def test_follower_chain():
    g = Game((Follower(tuple((f"a{i}", i + 1) for i in range(4))),)
             + tuple(Leaf(i, i) for i in range(4)))
    b = binarize_with_map(g)
    chain = b.chains[0]
    assert len(chain) == 3
    assert all(isinstance(b.game.nodes[c], Follower) for c in chain)
    assert b.game.nodes[chain[0]].actions[1][0] == REST
    assert b.game.nodes[chain[-1]].actions[1][0] == "a3"


def test_zero_branch_dropped_and_contracted():
    g = Game((Chance(((Fraction(1), 1), (Fraction(0), 2))), Leaf(1, 1), Leaf(5, 5)))
    assert binarize(g).nodes == (Leaf(1, 1),)


def test_single_leaf():
    sol = fptas_behavioral(Game((Leaf(4, 7),)), Fraction(1, 10))
    assert sol.guaranteed_value == 4


def test_chance_root():
    g = Game((Chance(((Fraction(1, 2), 1), (Fraction(1, 2), 2))), Leaf(2, 0), Leaf(4, 0)))
    sol = fptas_behavioral(g, Fraction(1, 10))
    assert Fraction(29, 10) <= sol.guaranteed_value <= 3


def test_threat_needs_mixing(threat_game):
    sol = fptas_behavioral(threat_game, Fraction(1, 100))
    assert sol.guaranteed_value >= 2 - Fraction(1, 100)
    assert replay_value(threat_game, sol)[0] >= sol.guaranteed_value


def _pairs_oracle(A_L, A_R, p, n):
    q = 1 - p
    best = [None] * n
    for i, x in enumerate(A_L):
        for j, y in enumerate(A_R):
            if x is None or y is None:
                continue
            top = min(n - 1, int((p * i + q * j) // 1))
            v = p * x + q * y
            for k in range(top + 1):
                if best[k] is None or v > best[k]:
                    best[k] = v
    return best


def _random_table(rng, n):
    last = rng.randrange(n)
    value, out = Fraction(rng.randint(0, 30)), []
    for k in range(n):
        out.append(value if k <= last else None)
        value -= Fraction(rng.choice([0, 0, 1, 2]), rng.randint(1, 4))
    return out


def test_chance_table_matches_all_pairs():
    rng = random.Random(3)
    for _ in range(300):
        n = rng.randint(1, 30)
        A_L, A_R = _random_table(rng, n), _random_table(rng, n)
        p = Fraction(rng.randint(1, 9), 10)
        table, _ = _chance_table(A_L, A_R, p, n)
        assert table == _pairs_oracle(A_L, A_R, p, n)


def _check_entries_realised(sol, rng):
    g = sol.binarized.game
    for s in sol.tables:
        entries = sol.tables[s].entries
        finite = [k for k in range(len(entries)) if entries[k] is not NEG_INF]
        for k in rng.sample(finite, min(2, len(finite))):
            _, val = leader_favoring_response(g, sol.substrategy(s, k))
            u1, u2 = val[s]
            assert u1 >= sol.params.unscale(k)
            assert u2 >= entries[k]


@given(random_trees(chance=True, max_nodes=5), st.sampled_from([Fraction(1, 2), Fraction(1, 10)]))
def test_pure_within_epsilon(g, eps):
    sol = fptas_pure(g, eps)
    ref = brute_force_pure_stackelberg(g).leader_value
    assert ref - eps <= sol.guaranteed_value <= ref
    assert replay_value(g, sol)[0] >= sol.guaranteed_value
    _check_entries_realised(sol, random.Random(0))


@given(random_trees(chance=True, max_nodes=4), st.sampled_from([Fraction(1, 2), Fraction(1, 10)]))
def test_behavioral_against_grid(g, eps):
    sol = fptas_behavioral(g, eps)
    assert sol.guaranteed_value >= grid_behavioral_stackelberg(g, 4) - eps
    assert replay_value(g, sol)[0] >= sol.guaranteed_value
    assert all(sol.tables[s].is_monotone() for s in sol.tables)
    _check_entries_realised(sol, random.Random(0))


def test_rejects_bad_epsilon(threat_game):
    with pytest.raises(ValueError):
        fptas_behavioral(threat_game, 0)
