from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from stackel import (Concurrent, Follower, Game, GenParams, Leaf, UnitItemsInstance,
                     brute_force_sefce, example_fig1, gen_knapsack_reduction, gen_random,
                     solve_sefce_concurrent, solve_sefce_tree, verify_no_deviation)
from stackel.lp_sefce import build_sefce_lp, reach_var

from conftest import random_trees


def test_example_value():
    flow = solve_sefce_concurrent(example_fig1())
    assert flow.leader_value == Fraction(3, 2)
    assert flow.delta[0] == 1


def test_single_leaf():
    assert solve_sefce_concurrent(Game((Leaf(7, -2),))).leader_value == 7


def test_indifferent_follower_gives_best_leaf():
    g = Game((Follower((("a", 1), ("b", 2), ("c", 3))), Leaf(1, 4), Leaf(9, 4), Leaf(3, 4)))
    assert solve_sefce_concurrent(g).leader_value == 9


def test_two_by_two():
    # column r strictly dominates l for the follower, so the leader settles for (d, r)
    g = Game((Concurrent(("u", "d"), ("l", "r"), (1, 2, 3, 4)),
              Leaf(4, 1), Leaf(0, 2), Leaf(1, 0), Leaf(2, 1)))
    flow = solve_sefce_concurrent(g)
    assert flow.leader_value == 2 == brute_force_sefce(g)[0]
    assert verify_no_deviation(g, flow.compact).ok


def test_program_shape():
    g = example_fig1()
    lp = build_sefce_lp(g)
    assert all(reach_var(s) in lp.variables for s in range(len(g.nodes)))


def test_reduction_game_lower_bound():
    g = gen_knapsack_reduction(UnitItemsInstance((1, 1), (1, 1), 1))
    assert solve_sefce_concurrent(g).leader_value >= 1


concurrent_games = st.builds(
    GenParams, seed=st.integers(0, 10 ** 6), node_count=st.integers(1, 4),
    branching=st.integers(2, 3), concurrent_fraction=st.just(Fraction(1, 2)),
    chance_fraction=st.just(Fraction(1, 6)), info=st.just("concurrent"),
    utility_range=st.integers(1, 4)).map(gen_random)


@given(concurrent_games)
def test_concurrent_matches_oracle(g):
    flow = solve_sefce_concurrent(g)
    assert flow.leader_value == brute_force_sefce(g)[0]
    assert verify_no_deviation(g, flow.compact).ok


@given(random_trees(chance=True))
def test_agrees_with_tree_solver(g):
    assert solve_sefce_concurrent(g).leader_value == solve_sefce_tree(g).leader_value
