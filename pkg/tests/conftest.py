from __future__ import annotations

import sys
from pathlib import Path

import pytest

from ec3probe.ec3_core import load_instance

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"
sys.path.insert(0, str(Path(__file__).resolve().parent))

QUOTED_CASES = {
    "case_i": (["00010111"], 800.0),
    "case_ii": (["00010010", "00110010"], 550.0),
    "case_iii": (["00001100", "00100110", "00110001", "11000010"], 400.0),
}

_acceptance_lines: list[str] = []


def record_acceptance(line: str) -> None:
    _acceptance_lines.append(line)
    print(line)


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def case_i():
    return load_instance(FIXTURES / "case_i.json")


@pytest.fixture(scope="session")
def case_ii():
    return load_instance(FIXTURES / "case_ii.json")


@pytest.fixture(scope="session")
def case_iii():
    return load_instance(FIXTURES / "case_iii.json")


@pytest.fixture(scope="session")
def unsat4():
    return load_instance(FIXTURES / "unsat4.json")


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
