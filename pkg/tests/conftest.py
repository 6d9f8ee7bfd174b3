import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

import pytest

# one line per acceptance criterion, echoed at the end of the run
_CRITERIA = {}


@pytest.fixture()
def criterion():
    def record(number, passed, detail=""):
        status = passed if isinstance(passed, str) else ("PASS" if passed else "FAIL")
        line = f"criterion {number:>2}: {status}  {detail}".rstrip()
        _CRITERIA[number] = line
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[number])
