from __future__ import annotations

import pytest

from hgzeta.chargauss import DEFAULT_PRECISION, set_precision

_criteria: dict = {}


@pytest.fixture(autouse=True, scope="session")
def _precision():
    set_precision(DEFAULT_PRECISION)
    yield


def pytest_runtest_logreport(report):
    marker = report.keywords.get("criterion_id") if hasattr(report, "keywords") else None
    for key in report.keywords:
        if key.startswith("criterion_"):
            marker = key
    if marker is None or not marker.startswith("criterion_"):
        return
    cid = marker[len("criterion_"):]
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        prev = _criteria.get(cid, [])
        prev.append((report.nodeid.split("::")[-1], report.outcome))
        _criteria[cid] = prev


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_criteria, key=lambda s: (len(s), s)):
        parts = _criteria[cid]
        ok = all(outcome == "passed" for _, outcome in parts)
        names = ", ".join(f"{name}={outcome}" for name, outcome in parts)
        terminalreporter.write_line(f"criterion {cid}: {'PASS' if ok else 'FAIL'} ({names})")
