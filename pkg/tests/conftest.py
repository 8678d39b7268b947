from pathlib import Path

import pytest

from refinekit import read_aut

DATA = Path(__file__).parent / "data"


def load(name):
    return read_aut(DATA / f"{name}.aut")


@pytest.fixture(scope="session")
def s0():
    return load("spec_s0")


@pytest.fixture(scope="session")
def t0():
    return load("impl_t0")


@pytest.fixture(scope="session")
def u0():
    return load("impl_u0")


@pytest.fixture(scope="session")
def incorrect():
    return [load(f"incorrect_s{i}") for i in range(4)]


@pytest.fixture(scope="session")
def violation():
    return load("violation_spec"), load("violation_impl")


# acceptance results are collected here by test_acceptance.py
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE, key=lambda n: int(n[2:])):
        ok, detail = ACCEPTANCE[name]
        terminalreporter.write_line(f"{name}: {'PASS' if ok else 'FAIL'}  {detail}")
