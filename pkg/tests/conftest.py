"""Per-criterion PASS/FAIL summary for the acceptance suite.

Acceptance tests carry ``@pytest.mark.acceptance(number, title)``.  A
criterion passes only if every test tagged with its number passed.
"""

from __future__ import annotations

import pytest

_TITLES: dict[int, str] = {}
_NODES: dict[str, int] = {}
_OUTCOMES: dict[int, list[tuple[str, str]]] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark is None or not mark.args:
            continue
        number, title = mark.args
        _TITLES.setdefault(number, title)
        _NODES[item.nodeid] = number
        _OUTCOMES.setdefault(number, [])


def pytest_runtest_logreport(report):
    number = _NODES.get(report.nodeid)
    if number is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        name = report.nodeid.rsplit("::", 1)[-1]
        outcome = "passed" if report.passed else ("skipped" if report.skipped else "failed")
        _OUTCOMES[number].append((name, outcome))


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_OUTCOMES):
        runs = _OUTCOMES[number]
        if not runs:
            continue
        bad = [name for name, outcome in runs if outcome != "passed"]
        status = "FAIL" if bad else "PASS"
        line = f"{status} criterion {number:2d}: {_TITLES[number]}"
        if bad:
            line += f"  (failing: {', '.join(bad)})"
        tr.write_line(line)


@pytest.fixture
def rng(request):
    """Generator seeded from the test's node id, stable across runs."""
    import zlib

    import numpy as np

    return np.random.default_rng(zlib.crc32(request.node.nodeid.encode()))
