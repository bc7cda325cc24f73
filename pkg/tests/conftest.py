import json
from functools import lru_cache
from pathlib import Path

import pytest

from argsector.functions import build_function
from argsector.specio import parse_document

FIXTURES = Path(__file__).parent / "fixtures"


@lru_cache(maxsize=None)
def ensembles() -> dict:
    return json.loads((FIXTURES / "ensembles.json").read_text(encoding="utf-8"))


def fixture_function(item: dict):
    doc = parse_document(json.dumps(item["spec"]))
    return build_function(doc.spec, doc.order)


@pytest.fixture(scope="session")
def general_ensemble():
    return [(item, fixture_function(item)) for item in ensembles()["general"]]


@pytest.fixture(scope="session")
def vanishing_ensemble():
    return [(item, fixture_function(item)) for item in ensembles()["vanishing"]]


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
