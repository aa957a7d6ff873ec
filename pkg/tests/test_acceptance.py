"""End-to-end acceptance criteria, run once each with the fixed master seed 7.

Each criterion prints a single PASS/FAIL line, and the same lines are
repeated in the pytest terminal summary.
"""

import pytest

from loggamma_polymer import acceptance

MASTER_SEED = 7
RESULTS = []


@pytest.mark.parametrize("criterion", acceptance.CRITERIA, ids=lambda fn: fn.__name__)
def test_criterion(criterion):
    result = criterion(MASTER_SEED, 1)
    RESULTS.append(result)
    print(result.line())
    assert result.passed, result.line()
