import pytest

from oviprob.relations import murua_against_oracle


@pytest.fixture(scope="session", autouse=True)
def murua_calibration():
    # the omega coloring convention is pinned by the brute-force inversion of
    # the Boolean-from-monotone relation; everything downstream trusts it
    report = murua_against_oracle(5)
    assert report.ok, report.failures
