"""Acceptance suite: each check compares a solver against an independent oracle.

Used by ``stackel selftest`` and by the test suite. Every check returns a
:class:`CriterionResult`; corpora are seeded, so results are deterministic.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field

from .fptas import ApproxSolution, fptas_behavioral, fptas_pure, replay_value
from .game import Follower, Game, Leaf, evaluate_profile
from .instances import (GenParams, UnitItemsInstance, example_fig1, gen_balanced,
                        gen_knapsack_reduction, gen_random, knapsack_optimum)
from .lp_sefce import solve_sefce_concurrent
from .numeric import Fraction
from .oracle import (brute_force_pure_stackelberg, brute_force_sefce,
                     grid_behavioral_stackelberg, grid_tradeoff_frontiers,
                     reachable_outcomes, reduction_exact_behavioral)
from .pure_dag import compute_capacities, possible_outcomes, solve_pure_dag
from .sefce import CompactSEFCE, solve_sefce_tree, upward_pass, verify_no_deviation


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float
    limit: float | None = None

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        budget = f" / limit {self.limit:g} s" if self.limit is not None else ""
        return f"criterion {self.number} [{mark}] {self.title}: {self.detail} ({self.seconds:.2f} s{budget})"


@dataclass
class SuiteState:
    """Outputs shared between checks: SEFCE results for the incentive audit
    and FPTAS solutions for the table audit."""

    sefce_outputs: list[tuple[Game, CompactSEFCE]] = field(default_factory=list)
    fptas_outputs: list[tuple[Game, ApproxSolution]] = field(default_factory=list)


def _result(number, title, failures, checked, started, limit, extra=""):
    elapsed = time.perf_counter() - started
    ok = not failures and (limit is None or elapsed < limit)
    detail = f"{checked} checked, {len(failures)} mismatches"
    if failures:
        detail += f" (first: {failures[0]})"
    if limit is not None and elapsed >= limit:
        detail += ", over time limit"
    if extra:
        detail += f", {extra}"
    return CriterionResult(number, title, ok, detail, elapsed, limit)


# --------------------------------------------------------------------------
# corpora


def pure_dag_corpus(count: int = 500) -> list[Game]:
    return [gen_random(GenParams(seed=s, node_count=1 + s % 10, branching=3, graph="dag"))
            for s in range(count)]


def sefce_tree_corpus(count: int = 200) -> list[Game]:
    out = []
    for s in range(count):
        chance = Fraction(1, 4) if s % 2 else Fraction(0)
        out.append(gen_random(GenParams(seed=s, node_count=2 + s % 7, branching=3,
                                        chance_fraction=chance)))
    return out


def concurrent_corpus(count: int = 100) -> list[Game]:
    return [gen_random(GenParams(seed=s, node_count=1 + s % 6, branching=3,
                                 concurrent_fraction=Fraction(1, 2),
                                 chance_fraction=Fraction(1, 6), info="concurrent"))
            for s in range(count)]


def fptas_corpus(count: int = 100) -> list[Game]:
    return [gen_random(GenParams(seed=s, node_count=2 + s % 8, branching=2,
                                 chance_fraction=Fraction(1, 3), utility_range=2))
            for s in range(count)]


def unit_items_corpus(count: int = 50) -> list[UnitItemsInstance]:
    out = []
    for s in range(count):
        rng = random.Random(s)
        budget = rng.randint(1, 3)
        extra = rng.randint(1, 6 - budget)
        weights = tuple(rng.randint(1, 4) for _ in range(extra)) + (1,) * budget
        values = tuple(rng.randint(1, 9) for _ in range(extra)) + (1,) * budget
        out.append(UnitItemsInstance(weights, values, budget))
    return out


# --------------------------------------------------------------------------
# checks


def check_example(state: SuiteState) -> CriterionResult:
    started = time.perf_counter()
    g = example_fig1()
    tree = solve_sefce_tree(g)
    flow = solve_sefce_concurrent(g)
    oracle, _ = brute_force_sefce(g)
    grid = grid_behavioral_stackelberg(g, 4)
    state.sefce_outputs += [(g, tree), (g, flow.compact)]
    got = {"sefce-tree": tree.leader_value, "sefce-lp": flow.leader_value,
           "sefce-oracle": oracle, "grid(4)": grid}
    want = {"sefce-tree": Fraction(3, 2), "sefce-lp": Fraction(3, 2),
            "sefce-oracle": Fraction(3, 2), "grid(4)": Fraction(1)}
    failures = [f"{k} = {got[k]}, expected {want[k]}" for k in want if got[k] != want[k]]
    return _result(1, "worked example values", failures, len(want), started, 1.0)


def check_pure_dag(state: SuiteState, games=None) -> CriterionResult:
    games = pure_dag_corpus() if games is None else games
    started = time.perf_counter()
    failures = []
    for n, g in enumerate(games):
        sol = solve_pure_dag(g)
        ref = brute_force_pure_stackelberg(g)
        possible = set(possible_outcomes(g, compute_capacities(g)))
        reach = reachable_outcomes(g)
        u1, _, dist = evaluate_profile(g, sol.leader_strategy.to_behavioral(),
                                       sol.follower_response.to_behavioral())
        if sol.leader_value != ref.leader_value or u1 != sol.leader_value:
            failures.append(f"game {n}: value {sol.leader_value} vs {ref.leader_value}")
        elif possible != reach:
            failures.append(f"game {n}: reachable leaves {sorted(possible)} vs {sorted(reach)}")
        elif dist.get(sol.chosen_leaf) != 1:
            failures.append(f"game {n}: strategies do not reach leaf {sol.chosen_leaf}")
    return _result(2, "pure DAG solver vs enumeration", failures, len(games), started, 30.0)


def check_sefce_tree(state: SuiteState, games=None) -> CriterionResult:
    games = sefce_tree_corpus() if games is None else games
    started = time.perf_counter()
    failures = []
    for n, g in enumerate(games):
        if sum(isinstance(nd, Follower) for nd in g.nodes) > 8:
            raise ValueError(f"corpus game {n} has more than 8 follower nodes")
        c = solve_sefce_tree(g)
        state.sefce_outputs.append((g, c))
        ref, _ = brute_force_sefce(g)
        if c.leader_value != ref:
            failures.append(f"game {n}: {c.leader_value} vs {ref}")
    return _result(3, "SEFCE tree solver vs correlated-plan LP", failures, len(games),
                   started, 60.0)


def check_sefce_lp(state: SuiteState, concurrent=None, turn_based=None) -> CriterionResult:
    concurrent = concurrent_corpus() if concurrent is None else concurrent
    turn_based = sefce_tree_corpus() if turn_based is None else turn_based
    started = time.perf_counter()
    failures = []
    for n, g in enumerate(concurrent):
        flow = solve_sefce_concurrent(g)
        state.sefce_outputs.append((g, flow.compact))
        ref, _ = brute_force_sefce(g)
        if flow.leader_value != ref:
            failures.append(f"concurrent game {n}: {flow.leader_value} vs {ref}")
    for n, g in enumerate(turn_based):
        flow = solve_sefce_concurrent(g)
        state.sefce_outputs.append((g, flow.compact))
        tree = solve_sefce_tree(g)
        if flow.leader_value != tree.leader_value:
            failures.append(f"turn-based game {n}: {flow.leader_value} vs {tree.leader_value}")
    return _result(4, "SEFCE LP vs oracle and tree solver", failures,
                   len(concurrent) + len(turn_based), started, 120.0)


def subtree_heights(game: Game) -> dict[int, int]:
    h: dict[int, int] = {}
    for s in reversed(game.topological_order()):
        kids = game.children(s)
        h[s] = 1 + max(h[c] for c in kids) if kids else 0
    return h


def upper_bound_violations(sol: ApproxSolution, frontiers) -> list[str]:
    """Table entries beaten by a grid strategy with enough leader utility to spare.

    An outcome securing scaled leader utility ``k + H_T`` at node T may offer
    the follower no more than entry k of T's table.
    """
    g = sol.binarized.game
    heights = subtree_heights(g)
    P = sol.params
    out = []
    for s in sol.tables:
        entries = sol.tables[s].entries
        for u1, u2 in frontiers[s]:
            k = math.floor((u1 - P.shift) / P.D) - heights[s]
            if 0 <= k < P.n and u2 > entries[k]:
                out.append(f"node {s} entry {k}: {entries[k]} < {u2}")
    return out


def check_fptas(state: SuiteState, games=None) -> CriterionResult:
    games = fptas_corpus() if games is None else games
    started = time.perf_counter()
    failures = []
    coarse = (Fraction(1, 2), Fraction(1, 10), Fraction(1, 50))
    fine = Fraction(1, 1000)
    for n, g in enumerate(games):
        ref = brute_force_pure_stackelberg(g).leader_value
        frontiers = None
        for eps in coarse:
            sp = fptas_pure(g, eps)
            state.fptas_outputs.append((g, sp))
            if not ref - eps <= sp.guaranteed_value <= ref:
                failures.append(f"game {n} pure eps={eps}: {sp.guaranteed_value} vs {ref}")
            sb = fptas_behavioral(g, eps)
            state.fptas_outputs.append((g, sb))
            if frontiers is None:
                frontiers = grid_tradeoff_frontiers(sb.binarized.game, 64)
            lower = replay_value(g, sb)[0]
            upper = max(u1 for u1, _ in frontiers[sb.binarized.game.root])
            if lower < sb.guaranteed_value or upper > sb.guaranteed_value + eps:
                failures.append(f"game {n} behavioral eps={eps}: guaranteed "
                                f"{sb.guaranteed_value}, replay {lower}, grid {upper}")
            bad = upper_bound_violations(sb, frontiers)
            if bad:
                failures.append(f"game {n} behavioral eps={eps}: {bad[0]}")
        sb = fptas_behavioral(g, fine)
        state.fptas_outputs.append((g, sb))
        grid = grid_behavioral_stackelberg(g, 8)
        if sb.guaranteed_value < grid - fine:
            failures.append(f"game {n} eps={fine}: {sb.guaranteed_value} vs grid {grid}")
    return _result(5, "FPTAS guarantees vs enumeration and grid", failures, len(games),
                   started, 300.0)


def check_tables(state: SuiteState) -> CriterionResult:
    started = time.perf_counter()
    failures = []
    tables = 0
    for n, (g, sol) in enumerate(state.fptas_outputs):
        for s in sol.tables:
            tables += 1
            if not sol.tables[s].is_monotone():
                failures.append(f"solution {n}: table at node {s} increases")
        got = replay_value(g, sol)[0]
        if got < sol.guaranteed_value:
            failures.append(f"solution {n}: replay {got} < guaranteed {sol.guaranteed_value}")
    return _result(6, "table monotonicity and replay soundness", failures,
                   len(state.fptas_outputs), started, None, f"{tables} tables")


def check_reduction(state: SuiteState, instances=None) -> CriterionResult:
    instances = unit_items_corpus() if instances is None else instances
    started = time.perf_counter()
    failures = []
    for n, inst in enumerate(instances):
        got = reduction_exact_behavioral(gen_knapsack_reduction(inst))
        want, _ = knapsack_optimum(inst)
        if got != want:
            failures.append(f"instance {n}: {got} vs optimum {want}")
    return _result(7, "reduction game value equals knapsack optimum", failures,
                   len(instances), started, 30.0)


def check_incentives(state: SuiteState) -> CriterionResult:
    started = time.perf_counter()
    failures = []
    for n, (g, c) in enumerate(state.sefce_outputs):
        report = verify_no_deviation(g, c)
        if not report.ok:
            failures.append(f"output {n}: {report.violations[0]}")
    return _result(8, "no profitable follower deviation", failures,
                   len(state.sefce_outputs), started, None)


def check_scale(state: SuiteState) -> CriterionResult:
    started = time.perf_counter()
    g = gen_balanced(4, 10)
    leaves = len(g.leaves())
    solve_sefce_tree(g)
    elapsed = time.perf_counter() - started
    hulls = upward_pass(g)
    depth = {g.root: 0}
    for s in g.topological_order():
        for c in g.children(s):
            depth[c] = depth[s] + 1
    per_level: dict[int, int] = {}
    for s, h in hulls.items():
        per_level[depth[s]] = per_level.get(depth[s], 0) + len(h)
    failures = [f"level {d}: {size} hull points > {leaves} leaves"
                for d, size in sorted(per_level.items()) if size > leaves]
    ok = not failures and elapsed < 10.0
    detail = (f"{leaves} leaves solved in {elapsed:.2f} s, largest level hull total "
              f"{max(per_level.values())}")
    if failures:
        detail += f", {failures[0]}"
    return CriterionResult(9, "SEFCE on a 10,000-leaf tree", ok, detail,
                           time.perf_counter() - started, 10.0)


CHECKS = {
    1: check_example,
    2: check_pure_dag,
    3: check_sefce_tree,
    4: check_sefce_lp,
    5: check_fptas,
    6: check_tables,
    7: check_reduction,
    8: check_incentives,
    9: check_scale,
}


def run_all(selected=None, report=None) -> list[CriterionResult]:
    """Run the checks in order; 6 and 8 audit what 5 and 1/3/4 produced."""
    state = SuiteState()
    wanted = set(CHECKS) if selected is None else set(selected)
    if 6 in wanted:
        wanted.add(5)
    if 8 in wanted:
        wanted |= {1, 3, 4}
    out = []
    for number in sorted(wanted):
        res = CHECKS[number](state)
        if report is not None:
            report(res)
        out.append(res)
    return out
