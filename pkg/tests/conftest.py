from pathlib import Path

import pytest

from tbnsat import read_tbn

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


@pytest.fixture
def corpus():
    def load(name):
        return read_tbn(CORPUS / name)
    return load


@pytest.fixture
def t_ex():
    return read_tbn(CORPUS / "t_ex.tbn")


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        ok, detail = RESULTS[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
