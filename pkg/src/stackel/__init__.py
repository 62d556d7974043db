"""Exact solvers for leader commitment in two-player sequential games.

Covers pure and behavioral Stackelberg commitment and Stackelberg
extensive-form correlated equilibria, with brute-force oracles for checking.
"""

from .budget import BudgetExceeded, OracleBudget
from .fptas import ApproxSolution, TradeoffTable, fptas_behavioral, fptas_pure, replay_value
from .game import (FOLLOWER, LEADER, BehavioralStrategy, Chance, Concurrent, Follower, Game,
                   GameError, Leader, Leaf, PureStrategy, classify, validate)
from .geometry import Hull2D
from .instances import (GenParams, KnapsackInstance, UnitItemsInstance, example_fig1,
                        gen_balanced, gen_knapsack_reduction, gen_random, knapsack_optimum)
from .io import dump, load, parse, serialize
from .lp_sefce import solve_sefce_concurrent
from .minmax import compute_minmax, solve_matrix_game
from .oracle import (brute_force_pure_stackelberg, brute_force_sefce,
                     grid_behavioral_stackelberg, reduction_exact_behavioral)
from .pure_dag import solve_pure_dag
from .sefce import CompactSEFCE, expand_compact, solve_sefce_tree, verify_no_deviation

__all__ = [
    "ApproxSolution", "BehavioralStrategy", "BudgetExceeded", "Chance", "CompactSEFCE",
    "Concurrent", "FOLLOWER", "Follower", "Game", "GameError", "GenParams", "Hull2D",
    "KnapsackInstance", "LEADER", "Leader", "Leaf", "OracleBudget", "PureStrategy",
    "TradeoffTable", "UnitItemsInstance", "brute_force_pure_stackelberg", "brute_force_sefce",
    "classify", "compute_minmax", "dump", "example_fig1", "expand_compact", "fptas_behavioral",
    "fptas_pure", "gen_balanced", "gen_knapsack_reduction", "gen_random",
    "grid_behavioral_stackelberg", "knapsack_optimum", "load", "parse",
    "reduction_exact_behavioral", "replay_value", "serialize", "solve_matrix_game",
    "solve_pure_dag", "solve_sefce_concurrent", "solve_sefce_tree", "validate",
    "verify_no_deviation",
]
