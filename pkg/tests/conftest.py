from __future__ import annotations

import sys

import pytest

from ampsynth.devices import default_params


@pytest.fixture(scope="session")
def params():
    return default_params()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
