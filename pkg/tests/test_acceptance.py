"""Every acceptance criterion at full scale, one test (and one summary line) each."""

import pytest

from phantomgames.acceptance import CHECKS, run_checks
from phantomgames.experiment import default_workers

from conftest import ACCEPTANCE_LINES

pytestmark = pytest.mark.acceptance


@pytest.fixture(scope="module")
def results():
    # one ordered pass, so the structural check also audits the runs of checks 3 to 7
    out = {r.number: r for r in run_checks("full", workers=default_workers())}
    ACCEPTANCE_LINES.extend(out[num].line() for num in sorted(out))
    return out


@pytest.mark.parametrize("number", sorted(CHECKS))
def test_criterion(results, number):
    res = results[number]
    print(res.line())
    assert res.passed, res.line()
