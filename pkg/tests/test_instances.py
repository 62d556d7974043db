from fractions import Fraction

import pytest

from stackel import (Concurrent, GenParams, KnapsackInstance, Leaf, UnitItemsInstance,
                     classify, gen_balanced, gen_knapsack_reduction, gen_random,
                     knapsack_optimum, validate)
from stackel.instances import knapsack_to_unit_items, reduction_big_m


def test_unit_items_conversion():
    u = knapsack_to_unit_items(KnapsackInstance((2,), (3,), 2, target=3))
    assert list(zip(u.weights, u.values)) == [(2, 9), (1, 1), (1, 1)]
    assert u.budget == 2 and u.target == 9


def test_conversion_preserves_optimum_order():
    k = KnapsackInstance((3, 2, 2), (5, 3, 3), 4)
    assert knapsack_optimum(k)[0] == 6
    assert knapsack_optimum(knapsack_to_unit_items(k))[0] == 6 * 5


def test_unit_items_requires_units():
    with pytest.raises(ValueError):
        UnitItemsInstance((2, 1), (3, 1), 2)


def test_reduction_layout():
    u = UnitItemsInstance((1, 1), (1, 1), 1)
    assert reduction_big_m(u) == 3
    g = gen_knapsack_reduction(u)
    root = g.nodes[g.root]
    assert isinstance(root, Concurrent) and root.rows == ("l1", "l2") and len(root.cols) == 3
    for i, r in enumerate(root.rows):
        for j, col in enumerate(root.cols):
            child = g.nodes[root.child(r, col)]
            if j == 0:
                assert isinstance(child, Concurrent)
                leaves = [g.nodes[c] for c in child.cells]
                assert leaves == [Leaf(2, -2), Leaf(0, -2), Leaf(2, -2), Leaf(0, 0)]
            elif j == i + 1:
                assert child == Leaf(0, 2)
            else:
                assert child == Leaf(0, -4)


def test_generator_deterministic():
    p = GenParams(seed=11, node_count=7, branching=3, chance_fraction=Fraction(1, 3))
    assert gen_random(p) == gen_random(p)


def test_generator_valid_and_sized():
    for seed in range(1000):
        p = GenParams(seed=seed, node_count=seed % 9, branching=2 + seed % 3,
                      chance_fraction=Fraction(1, 4))
        g = gen_random(p)
        assert validate(g).ok
        assert sum(not isinstance(nd, Leaf) for nd in g.nodes) == p.node_count


def test_dag_mode():
    shared = 0
    for seed in range(50):
        g = gen_random(GenParams(seed=seed, node_count=6, branching=2, graph="dag"))
        assert validate(g).ok
        shared += classify(g).graph == "dag"
    assert shared > 0


def test_concurrent_mode():
    g = gen_random(GenParams(seed=2, node_count=3, concurrent_fraction=Fraction(0),
                             info="concurrent"))
    assert any(isinstance(nd, Concurrent) for nd in g.nodes)


def test_bad_params():
    with pytest.raises(ValueError):
        gen_random(GenParams(branching=1))
    with pytest.raises(ValueError):
        gen_random(GenParams(chance_fraction=Fraction(3, 4), concurrent_fraction=Fraction(1, 2),
                             info="concurrent"))


def test_balanced():
    g = gen_balanced(3, 4, seed=5)
    assert len(g.leaves()) == 64
    assert gen_balanced(3, 4, seed=5) == g
    assert all(abs(g.nodes[z].u1) <= 100 for z in g.leaves())


def test_zero_budget_conversion():
    k = KnapsackInstance((2, 5), (3, 4), 0, target=1)
    u = knapsack_to_unit_items(k)
    assert (u.weights, u.values, u.budget, u.target) == ((2, 5), (3, 4), 0, 1)


def test_big_m_dominates():
    for inst in (UnitItemsInstance((3, 1, 1), (7, 1, 1), 2),
                 UnitItemsInstance((1, 4, 1), (1, 2, 1), 1)):
        M, n, W = reduction_big_m(inst), inst.size, inst.budget
        assert all(M > W * n * v and M > n * w for w, v in zip(inst.weights, inst.values))
        assert validate(gen_knapsack_reduction(inst)).ok
