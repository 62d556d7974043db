from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from stackel import Follower, Game, GenParams, Leader, Leaf, gen_random

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def tree_params(chance=False, max_nodes=6, branching=3):
    return st.builds(
        GenParams,
        seed=st.integers(0, 10 ** 6),
        node_count=st.integers(1, max_nodes),
        branching=st.integers(2, branching),
        chance_fraction=st.just(Fraction(1, 3) if chance else Fraction(0)),
        utility_range=st.integers(1, 4),
    )


def random_trees(**kw):
    return tree_params(**kw).map(gen_random)


@pytest.fixture
def threat_game():
    """Leader root over leaf (2,0) and a follower node over (5,1), (0,3)."""
    return Game((
        Leader((("z0", 1), ("f", 2))),
        Leaf(2, 0),
        Follower((("z1", 3), ("z2", 4))),
        Leaf(5, 1),
        Leaf(0, 3),
    ))


@pytest.fixture
def signal_game():
    """Follower root: left to a leader node over (4,0), (0,2); right to leaf (1,1)."""
    return Game((
        Follower((("left", 1), ("right", 2))),
        Leader((("a", 3), ("b", 4))),
        Leaf(1, 1),
        Leaf(4, 0),
        Leaf(0, 2),
    ))
