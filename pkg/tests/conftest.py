import json
import sys
from pathlib import Path

import pytest

from mcpoint.newforms import default_store

DATA = Path(__file__).parent / "data"
sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def store():
    return default_store()


@pytest.fixture(scope="session")
def al_traces():
    path = DATA / "al_traces.json"
    if not path.exists():
        pytest.skip("al_traces.json not generated (scripts/pari_al_traces.py)")
    return json.loads(path.read_text())


def load_data(name):
    return json.loads((DATA / name).read_text())


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
