from fractions import Fraction

import pytest
from hypothesis import given

from stackel import (BudgetExceeded, GameError, KnapsackInstance, OracleBudget,
                     UnitItemsInstance, brute_force_pure_stackelberg, brute_force_sefce,
                     gen_balanced, gen_knapsack_reduction, grid_behavioral_stackelberg,
                     knapsack_optimum, reduction_exact_behavioral)
from stackel.fptas import binarize
from stackel.oracle import grid_tradeoff_frontiers, reachable_outcomes

from conftest import random_trees


def test_grid_signal_game(signal_game):
    # committing to a 1/2 mix keeps the follower on the left; pure play cannot
    assert grid_behavioral_stackelberg(signal_game, 1) == 1
    assert grid_behavioral_stackelberg(signal_game, 2) == 2


def test_pure_threat_game(threat_game):
    assert brute_force_pure_stackelberg(threat_game).leader_value == 2
    assert reachable_outcomes(threat_game) == {1, 4}


@given(random_trees(chance=True, max_nodes=4))
def test_grid_refines(g):
    one = grid_behavioral_stackelberg(g, 1)
    assert one == brute_force_pure_stackelberg(g).leader_value
    assert one <= grid_behavioral_stackelberg(g, 2) <= grid_behavioral_stackelberg(g, 4)
    assert grid_behavioral_stackelberg(g, 4) <= brute_force_sefce(g)[0]


@given(random_trees(chance=True, max_nodes=4))
def test_frontier_root_matches_grid(g):
    b = binarize(g)
    for grid in (1, 2):
        front = grid_tradeoff_frontiers(b, grid)[b.root]
        assert max(u1 for u1, _ in front) == grid_behavioral_stackelberg(b, grid)
        u2s = [u2 for _, u2 in front]
        assert u2s == sorted(u2s, reverse=True)


def test_reduction_values():
    assert reduction_exact_behavioral(gen_knapsack_reduction(
        UnitItemsInstance((1, 1), (1, 1), 1))) == 1
    assert reduction_exact_behavioral(gen_knapsack_reduction(
        UnitItemsInstance((1, 1, 1), (1, 1, 1), 2))) == 2


def test_reduction_of_plain_knapsack():
    # a plain instance is converted to unit items first, whose optimum is 1 here
    k = KnapsackInstance((2,), (3,), 1)
    assert reduction_exact_behavioral(gen_knapsack_reduction(k)) == 1


def test_reduction_matches_optimum():
    u = UnitItemsInstance((2, 3, 1, 1), (5, 7, 1, 1), 2)
    assert reduction_exact_behavioral(gen_knapsack_reduction(u)) == knapsack_optimum(u)[0] == 5


def test_reduction_shape_checked(threat_game):
    with pytest.raises(GameError):
        reduction_exact_behavioral(threat_game)


def test_budget_refusals():
    g = gen_balanced(3, 3)
    small = OracleBudget(max_decision_nodes=4)
    with pytest.raises(BudgetExceeded):
        brute_force_pure_stackelberg(g, small)
    with pytest.raises(BudgetExceeded):
        brute_force_sefce(g, small)
    with pytest.raises(BudgetExceeded):
        grid_behavioral_stackelberg(g, 2, small)
    with pytest.raises(ValueError):
        grid_behavioral_stackelberg(g, 0)


def test_budget_from_env(monkeypatch):
    monkeypatch.setenv("STACKEL_BUDGET_NODES", "3")
    with pytest.raises(BudgetExceeded):
        brute_force_pure_stackelberg(gen_balanced(2, 3))


def test_grid_on_reduction_game():
    g = gen_knapsack_reduction(UnitItemsInstance((1, 1), (1, 1), 1))
    assert grid_behavioral_stackelberg(g, 2) == 1
