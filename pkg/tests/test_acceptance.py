"""The twelve acceptance criteria, one verification suite each, at full size.

Run directly (`python tests/test_acceptance.py`) for a plain PASS/FAIL table,
or through pytest, which prints the same line for every criterion.
"""

import json
import sys

import pytest

from arcops.suites import REGISTRY, run_suite

CRITERIA = list(enumerate(REGISTRY, start=1))


def _line(number: int, name: str, report) -> str:
    return f"criterion {number} {name}: {'PASS' if report.passed else 'FAIL'}"


@pytest.mark.parametrize("number,name", CRITERIA, ids=[f"{n}-{s}" for n, s in CRITERIA])
def test_criterion(number, name, capsys):
    report = run_suite(name, "full")
    with capsys.disabled():
        print("\n" + _line(number, name, report))
    failing = [c.to_dict() for c in report.checks if not c.passed]
    assert report.passed, json.dumps(failing, indent=2)


def test_registry_has_twelve_criteria():
    assert len(REGISTRY) == 12


if __name__ == "__main__":
    ok = True
    for number, name in CRITERIA:
        report = run_suite(name, "full")
        ok &= report.passed
        print(_line(number, name, report), flush=True)
    sys.exit(0 if ok else 1)
