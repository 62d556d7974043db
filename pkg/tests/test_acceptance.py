"""Acceptance suite: one pass/fail line per criterion.

Runs under pytest (one test per criterion) or directly with
``python tests/test_acceptance.py``. The full suite takes several minutes.
"""

import sys

import pytest

from stackel.acceptance import CHECKS, run_all


@pytest.fixture(scope="module")
def results():
    return {r.number: r for r in run_all()}


@pytest.mark.parametrize("number", sorted(CHECKS))
def test_criterion(results, number, capsys):
    r = results[number]
    with capsys.disabled():
        print("\n" + r.line())
    assert r.passed, r.line()


if __name__ == "__main__":
    outcome = run_all(report=lambda r: print(r.line(), flush=True))
    sys.exit(0 if all(r.passed for r in outcome) else 1)
