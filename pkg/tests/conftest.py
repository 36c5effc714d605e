import sys
from fractions import Fraction

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def F(x):
    return Fraction(x)


@pytest.fixture
def frac():
    return Fraction


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for i in sorted(results):
        ok, desc = results[i]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {i}: {desc}")
