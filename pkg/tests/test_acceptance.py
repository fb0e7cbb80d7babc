"""Acceptance suite: one test per criterion, each printing its PASS/FAIL line."""

import pytest

from nhdm.acceptance import CRITERIA, format_result, run_acceptance


@pytest.fixture(scope="module")
def results():
    return {r.name: r for r in run_acceptance()}


@pytest.mark.parametrize("name", list(CRITERIA), ids=[f"{n}-{k}" for k, (n, _) in CRITERIA.items()])
def test_criterion(name, results, capsys):
    r = results[name]
    with capsys.disabled():
        print("\n" + format_result(r, verbose=not r.passed))
    assert r.passed, format_result(r, verbose=True)


def test_suite_is_deterministic():
    first = [format_result(r, verbose=True) for r in run_acceptance(only=["counterexample", "properties"])]
    second = [format_result(r, verbose=True) for r in run_acceptance(only=["counterexample", "properties"])]
    assert first == second


def test_override_only_tightens(results):
    loose = run_acceptance(only=["two-state"], tol=1.0)[0]
    assert loose.passed == results["two-state"].passed
    assert [c.limit for c in loose.checks] == [c.limit for c in results["two-state"].checks]
