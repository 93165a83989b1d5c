import random

import pytest
from hypothesis import strategies as st

from carnot.catalog import CATALOG

CATALOG_NAMES = sorted(CATALOG)

rationals = st.fractions(min_value=-4, max_value=4, max_denominator=5)


@pytest.fixture(params=CATALOG_NAMES)
def catalog_algebra(request):
    return CATALOG[request.param].build()


@pytest.fixture
def rng():
    return random.Random(20240611)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion."""

    def record(label: str, ok: bool, detail: str = "") -> bool:
        _ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {label}" + (f" ({detail})" if detail else ""))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
