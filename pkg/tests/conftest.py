from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # gen / cf_oracle helpers

from fmgc.model import PHONE_MODEL_TEXT, parse_model
from fmgc.preferences import ItemKind, load_interactions

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def phone_model():
    return parse_model(PHONE_MODEL_TEXT)


@pytest.fixture
def phone_text():
    return PHONE_MODEL_TEXT


@pytest.fixture
def order3x4():
    return load_interactions((DATA_DIR / "order3x4.csv").read_text(), ItemKind.CONSTRAINT_ORDER)


@pytest.fixture
def order5x8():
    return load_interactions((DATA_DIR / "order5x8.csv").read_text(), ItemKind.CONSTRAINT_ORDER)


@pytest.fixture
def choice3():
    return load_interactions((DATA_DIR / "choice3.csv").read_text(), ItemKind.FEATURE_CHOICE)


# One visible pass/fail line per acceptance criterion.
_acceptance_results: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    _acceptance_results.append((name, "PASS" if report.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, outcome in _acceptance_results:
        terminalreporter.write_line(f"[{outcome}] {name}")
