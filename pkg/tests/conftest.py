from __future__ import annotations

import re

import pytest

_CRITERIA: dict[str, str] = {}


@pytest.fixture
def record_criterion():
    """Store the one-line verdict for an acceptance criterion; printed at the end of the run."""

    def record(label: str, passed: bool, text: str) -> None:
        status = "PASS" if passed else "FAIL"
        _CRITERIA[label] = f"[{status}] criterion {label}: {text}"

    return record


def _order(label: str):
    return int(re.match(r"\d+", label).group()), label


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for label in sorted(_CRITERIA, key=_order):
            terminalreporter.write_line(_CRITERIA[label])
