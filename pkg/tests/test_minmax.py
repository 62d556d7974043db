from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from stackel import Concurrent, Game, Leaf, compute_minmax, example_fig1, solve_matrix_game
from stackel.game import BehavioralStrategy, FOLLOWER, LEADER, leader_favoring_response

from conftest import random_trees


def test_leaf_value():
    assert compute_minmax(Game((Leaf(5, 1),))).mu[0] == 1


def test_threat_game(threat_game):
    mu = compute_minmax(threat_game).mu
    assert mu[2] == 3 and mu[0] == 0


def test_matching_pennies_node():
    g = Game((Concurrent(("u", "d"), ("l", "r"), (1, 2, 3, 4)),
              Leaf(0, 1), Leaf(0, -1), Leaf(0, -1), Leaf(0, 1)))
    mm = compute_minmax(g)
    assert mm.mu[0] == 0
    assert mm.punish_leader.mix[0] == {"u": Fraction(1, 2), "d": Fraction(1, 2)}
    assert mm.punish_follower.mix[0] == {"l": Fraction(1, 2), "r": Fraction(1, 2)}


def test_example_threats():
    mu = compute_minmax(example_fig1()).mu
    assert mu[4] == 1 and mu[2] == 2


def test_small_matrices():
    assert solve_matrix_game([[Fraction(0)]])[0] == 0
    assert solve_matrix_game([[1, -1], [-1, 1]])[0] == 0


@given(st.lists(st.lists(st.integers(-5, 5), min_size=3, max_size=3), min_size=3, max_size=3))
def test_matrix_value_has_certificates(matrix):
    """Row player minimises: its mix caps every column, the column mix floors every row."""
    value, rows, cols = solve_matrix_game(matrix)
    assert sum(rows) == 1 and sum(cols) == 1 and min(rows) >= 0 and min(cols) >= 0
    for j in range(3):
        assert sum(rows[i] * matrix[i][j] for i in range(3)) <= value
    for i in range(3):
        assert sum(cols[j] * matrix[i][j] for j in range(3)) >= value


@given(random_trees(chance=True))
def test_punishment_holds_follower_to_mu(g):
    """Against the punishment strategy the follower's best value is exactly mu."""
    mm = compute_minmax(g)
    _, val = leader_favoring_response(g, mm.punish_leader)
    for s in g.topological_order():
        assert val[s][1] == mm.mu[s]
