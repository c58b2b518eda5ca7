import os
import sys
from collections import defaultdict

sys.path.insert(0, os.path.dirname(__file__))

_outcomes = defaultdict(list)
_titles = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None or call.when != "call" and not (call.when == "setup" and call.excinfo):
        return
    number, title = marker.args
    _titles[number] = title
    _outcomes[number].append(call.excinfo is None)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_outcomes):
        verdict = "PASS" if all(_outcomes[number]) else "FAIL"
        n_ok, n = sum(_outcomes[number]), len(_outcomes[number])
        terminalreporter.write_line(f"{verdict}  criterion {number}: {_titles[number]} ({n_ok}/{n} checks)")
