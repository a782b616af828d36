"""Full-size acceptance run: one line per criterion, then one test each.

Runs every criterion once (a few minutes on one core) and criterion 15
reruns all of them with 8 workers.
"""
import pytest

from conclab import acceptance
from conclab.verify import clopper_pearson

LIS_UNRESOLVABLE = (
    "the u=50 row of the LIS upper curve is 2exp(-2500/(4*58)) = 4.2e-5, below the "
    "99% Clopper-Pearson upper limit 5.3e-5 of a zero count at 10^5 samples, so no "
    "sample of that size can pass it")


@pytest.fixture(scope="module")
def results():
    return {r.number: r for r in acceptance.run(range(1, 16), workers=1, det_workers=8)}


def _show(request, res):
    capman = request.config.pluginmanager.getplugin("capturemanager")
    with capman.global_and_fixture_disabled():
        print("\n" + res.line, flush=True)


CRITERIA = [pytest.param(k, marks=pytest.mark.xfail(strict=True, reason=LIS_UNRESOLVABLE)) if k == 10 else k
            for k in range(1, 16)]


@pytest.mark.parametrize("k", CRITERIA)
def test_criterion(k, results, request):
    res = results[k]
    _show(request, res)
    assert res.passed, res.summary


def test_criterion_10_failures_are_resolution_limits(results):
    d = results[10].details
    assert d["failing"], "criterion 10 now passes; drop the xfail"
    assert d["non_resolution_failures"] == []
    floor = clopper_pearson(0, 100_000)[1]
    for _, _, b in d["unresolvable"]:
        assert b < floor
    assert results[10].seconds < 120
