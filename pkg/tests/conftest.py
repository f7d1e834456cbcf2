import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(Path(__file__).resolve().parent))

_criteria: dict[str, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id, title): acceptance criterion covered by the test")


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None or call.when not in ("setup", "call"):
        return
    cid, title = mark.args
    entry = _criteria.setdefault(cid, {"title": title, "ok": True, "tests": 0})
    if call.when == "call":
        entry["tests"] += 1
    if call.excinfo is not None and not call.excinfo.errisinstance(pytest.skip.Exception):
        entry["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for cid in sorted(_criteria, key=lambda c: int(c[1:])):
        e = _criteria[cid]
        status = "PASS" if e["ok"] and e["tests"] else "FAIL"
        tr.write_line(f"{status} {cid:>3}  {e['title']}  ({e['tests']} tests)")


@pytest.fixture
def scenario_dir() -> Path:
    return ROOT / "scenarios"
