"""Acceptance criteria at full Monte Carlo scale.

Each criterion is one test; the summary lines are printed at the end of
the pytest run (see ``conftest.py``).  Run on its own with
``pytest -v tests/test_acceptance.py`` or ``leoship validate``.
"""
import pytest

from leoship import acceptance

pytestmark = [pytest.mark.acceptance, pytest.mark.slow]

RESULTS: dict = {}


@pytest.mark.parametrize("cid", list(acceptance.CHECKS))
def test_criterion(cid):
    crit = acceptance.run_all(ids=[cid])[0]
    RESULTS[cid] = crit
    assert crit.status == acceptance.PASS, crit.line()
