from __future__ import annotations

from pathlib import Path

import pytest

from zerosurgery.census import CascadeConfig, run_census
from zerosurgery.cli import dumps
from zerosurgery.diagram import bundled_table

DATA = Path(__file__).parent / "data"
SNAPSHOT = DATA / "census_snapshot.json"


@pytest.fixture(scope="session")
def full_census():
    """Two index-7 census runs over the <= 9 crossing table with different worker counts.

    The second run also sees the table in reverse order.
    """
    table = bundled_table()
    cfg = CascadeConfig(max_index=7, core_cap=720, max_cosets=10**6)
    first = run_census(table, cfg, workers=1)
    second = run_census(table[::-1], cfg, workers=2)
    return first, dumps(first.to_json()), dumps(second.to_json())


# -- acceptance reporting: one PASS/FAIL line per criterion -------------------------

_criteria: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    rep = outcome.get_result()
    if rep.when == "call" or rep.failed:
        n, title = mark.args
        entry = _criteria.setdefault(n, {"title": title, "failed": [], "ran": 0})
        entry["ran"] += rep.when == "call"
        if rep.failed:
            entry["failed"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        e = _criteria[n]
        status = "FAIL" if e["failed"] else "PASS"
        line = f"criterion {n}: {status}  {e['title']}"
        if e["failed"]:
            line += f"  (failing: {', '.join(e['failed'])})"
        terminalreporter.write_line(line)
