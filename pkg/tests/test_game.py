from fractions import Fraction

import pytest
from hypothesis import given

from stackel import (LEADER, FOLLOWER, BehavioralStrategy, Chance, Concurrent, Follower, Game,
                     Leader, Leaf, PureStrategy, classify, example_fig1, validate)
from stackel.game import (GameError, evaluate_profile, leader_favoring_response,
                          reach_probabilities, require_valid)

from conftest import random_trees


def test_two_leaf_game_is_valid():
    g = Game((Leader((("l", 1), ("r", 2))), Leaf(1, 0), Leaf(0, 1)))
    assert validate(g).ok


def test_chance_sum_is_checked():
    g = Game((Chance(((Fraction(1, 2), 1), (Fraction(1, 3), 2))), Leaf(0, 0), Leaf(1, 1)))
    assert "chance-sum" in validate(g).kinds()


def test_cycle_is_reported():
    g = Game((Leader((("a", 1),)), Leader((("b", 0),))))
    assert "cycle" in validate(g).kinds()
    with pytest.raises(GameError):
        require_valid(g)


def test_dangling_child_is_reported():
    g = Game((Leader((("a", 5),)),))
    assert "dangling" in validate(g).kinds()


def test_classification():
    tb = Game((Leader((("l", 1), ("r", 2))), Leaf(1, 0), Leaf(0, 1)))
    c = classify(tb)
    assert (c.graph, c.info, c.chance) == ("tree", "turn-based", False)
    cm = Game((Concurrent(("u", "d"), ("l", "r"), (1, 2, 3, 4)),
               Leaf(0, 0), Leaf(1, 0), Leaf(0, 1), Leaf(1, 1)))
    assert classify(cm).info == "concurrent"
    dag = Game((Follower((("a", 1), ("b", 2))), Leader((("x", 3), ("y", 4))),
                Leader((("x", 3), ("y", 4))), Leaf(0, 0), Leaf(1, 1)), graph="dag")
    assert classify(dag).graph == "dag"


def test_pure_choice_evaluates_to_leaf():
    g = Game((Leader((("l", 1), ("r", 2))), Leaf(3, 0), Leaf(0, 1)))
    s1 = PureStrategy(LEADER, {0: "l"}).to_behavioral()
    u1, u2, _ = evaluate_profile(g, s1, BehavioralStrategy(FOLLOWER, {}))
    assert (u1, u2) == (3, 0)


def test_chance_expectation():
    g = Game((Chance(((Fraction(1, 2), 1), (Fraction(1, 2), 2))), Leaf(2, 0), Leaf(4, 0)))
    u1, u2, _ = evaluate_profile(g, BehavioralStrategy(LEADER, {}), BehavioralStrategy(FOLLOWER, {}))
    assert (u1, u2) == (3, 0)


def test_example_on_path_profile():
    g = example_fig1()
    s1 = BehavioralStrategy(LEADER, {3: {"left": Fraction(1, 2), "right": Fraction(1, 2)},
                                     4: {"right": Fraction(1)}})
    s2 = BehavioralStrategy(FOLLOWER, {0: {"left": Fraction(1)},
                                       1: {"left": Fraction(1, 2), "right": Fraction(1, 2)}})
    u1, u2, _ = evaluate_profile(g, s1, s2)
    assert (u1, u2) == (Fraction(3, 2), 2)


def test_leader_favoring_ties():
    g = Game((Follower((("a", 1), ("b", 2))), Leaf(5, 2), Leaf(0, 2)))
    resp, val = leader_favoring_response(g, BehavioralStrategy(LEADER, {}))
    assert resp.choice[0] == "a"
    assert val[0] == (5, 2)


@given(random_trees(chance=True))
def test_reach_probabilities_sum_to_one(g):
    mix = {s: {a: Fraction(1, len(g.nodes[s].actions)) for a, _ in g.nodes[s].actions}
           for s in g.ids(Leader)}
    resp, _ = leader_favoring_response(g, BehavioralStrategy(LEADER, mix))
    reach = reach_probabilities(g, BehavioralStrategy(LEADER, mix), resp.to_behavioral())
    assert sum(reach[z] for z in g.leaves()) == 1


@given(random_trees(chance=True))
def test_response_is_a_best_response(g):
    """The follower's value under the returned response is maximal at every node."""
    s1 = BehavioralStrategy(LEADER, {s: {g.nodes[s].actions[-1][0]: Fraction(1)}
                                     for s in g.ids(Leader)})
    resp, val = leader_favoring_response(g, s1)
    for s in g.ids(Follower):
        best = max(val[c][1] for _, c in g.nodes[s].actions)
        assert val[s][1] == best
