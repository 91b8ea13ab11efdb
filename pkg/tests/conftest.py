import json
from pathlib import Path

import pytest
from hypothesis import settings

from unillc.catalog import load_catalog
from unillc.hecke import load_params

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

DATA = Path(__file__).resolve().parent.parent / "src" / "unillc" / "data"
ROOT = Path(__file__).resolve().parent.parent


@pytest.fixture(scope="session")
def catalog():
    return load_catalog()


@pytest.fixture(scope="session")
def params():
    return load_params()


def load_schema(name):
    return json.loads((DATA / f"{name}.schema.json").read_text())


def pytest_terminal_summary(terminalreporter):
    acc = __import__("sys").modules.get("test_acceptance")
    lines = getattr(acc, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line[1])
