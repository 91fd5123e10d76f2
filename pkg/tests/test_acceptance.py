"""End-to-end acceptance: one check per published result, with a pass/fail line each."""

import pytest

from graphtensor import suites

RESULTS: dict[int, suites.CheckResult] = {}


@pytest.mark.parametrize("number, key", list(enumerate(suites.CHECKS, 1)),
                         ids=[f"{i}-{k}" for i, k in enumerate(suites.CHECKS, 1)])
def test_acceptance(number, key):
    result = suites.CHECKS[key]()
    RESULTS[number] = result
    print(f"criterion {number:2d} {result.line()}")
    assert result.passed, result.details
