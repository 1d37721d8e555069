"""Every acceptance criterion at its stated tolerance and time budget.

One pass/fail line per criterion is printed in the terminal summary.
The long-running ones are marked slow.
"""

import pytest

from asbarron.acceptance import CRITERIA
from conftest import ACCEPTANCE_LINES

SLOW = {6, 7, 10}


@pytest.mark.parametrize(
    "number",
    [pytest.param(k, marks=pytest.mark.slow) if k in SLOW else k for k in range(1, len(CRITERIA) + 1)],
    ids=[f.__name__.removeprefix("criterion_") for f in CRITERIA],
)
def test_criterion(number):
    result = CRITERIA[number - 1]()
    ACCEPTANCE_LINES.append(result.line())
    assert result.holds, result.detail
    assert result.in_time, f"took {result.seconds:.1f}s, budget {result.limit:.0f}s"
