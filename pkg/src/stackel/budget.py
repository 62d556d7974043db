"""Size limits for the exponential routines (oracles, explicit expansion)."""

from __future__ import annotations

import os
from dataclasses import dataclass

ENV_VAR = "STACKEL_BUDGET_NODES"


class BudgetExceeded(RuntimeError):
    """Refusal to run an exponential routine on an input that is too large."""

    def __init__(self, message: str, estimate=None):
        super().__init__(message)
        self.estimate = estimate


@dataclass(frozen=True)
class OracleBudget:
    max_decision_nodes: int = 14
    max_pure_profiles: int = 2 ** 20

    @classmethod
    def from_env(cls) -> "OracleBudget":
        raw = os.environ.get(ENV_VAR)
        if raw:
            return cls(max_decision_nodes=int(raw))
        return cls()

    def check_nodes(self, count: int, what: str) -> None:
        if count > self.max_decision_nodes:
            raise BudgetExceeded(
                f"{what}: {count} decision nodes exceeds the budget of "
                f"{self.max_decision_nodes} (set {ENV_VAR} to raise it)", count)

    def check_profiles(self, count: int, what: str) -> None:
        if count > self.max_pure_profiles:
            raise BudgetExceeded(
                f"{what}: about {count} pure profiles exceeds the budget of "
                f"{self.max_pure_profiles}", count)
