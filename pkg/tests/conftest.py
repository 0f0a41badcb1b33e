from pathlib import Path

import pytest

from porel.dbfile import load_database

FIG1 = Path(__file__).resolve().parents[1] / "docs" / "fig1.json"


@pytest.fixture
def fig1():
    return load_database(str(FIG1))


@pytest.fixture
def fig1_path():
    return str(FIG1)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import REPORT
    except ImportError:
        return
    if not REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(REPORT):
        terminalreporter.write_line(REPORT[n])
