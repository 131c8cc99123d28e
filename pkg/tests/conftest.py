import re
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_OUTCOMES: dict[int, list[tuple[str, str, str]]] = {}
_NOTES: dict[str, str] = {}


@pytest.fixture
def note(request):
    """Attach a one-line detail to the acceptance summary for this test."""
    def add(text: str) -> None:
        _NOTES[request.node.nodeid] = text
    return add


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", report.nodeid)
    if not m:
        return
    num = int(m.group(1))
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        status = "PASS" if report.outcome == "passed" else "FAIL"
        _OUTCOMES.setdefault(num, []).append((status, m.group(2).replace("_", " "), report.nodeid))


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_OUTCOMES):
        runs = _OUTCOMES[num]
        status = "FAIL" if any(r[0] == "FAIL" for r in runs) else "PASS"
        name = runs[0][1]
        detail = "; ".join(_NOTES[r[2]] for r in runs if r[2] in _NOTES)
        terminalreporter.write_line(f"criterion {num:2d} {status}  {name}" + (f"  [{detail}]" if detail else ""))
