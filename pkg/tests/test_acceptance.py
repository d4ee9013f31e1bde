"""The acceptance battery, one test per criterion at its stated tolerance.

Each test prints a ``[PASS]``/``[FAIL]`` line; running this file directly
prints the same lines without pytest.
"""

import pytest

from novikov.acceptance import CRITERIA, criterion_1, run_all


@pytest.mark.parametrize("fn", CRITERIA, ids=[f"criterion_{i}" for i in range(1, len(CRITERIA) + 1)])
def test_criterion(fn, capsys):
    verdict = fn()
    with capsys.disabled():
        print("\n" + verdict.line())
    assert verdict.passed, verdict.detail


def test_injected_fault_is_caught():
    v = criterion_1(count=5, fault=True)
    assert not v.passed


if __name__ == "__main__":
    import sys
    results = run_all(echo=print)
    sys.exit(0 if all(v.passed for v in results) else 1)
