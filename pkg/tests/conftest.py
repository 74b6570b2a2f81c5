from fractions import Fraction

import pytest

from qgt.arith import EvalConfig


@pytest.fixture
def cfg():
    return EvalConfig(Fraction(1, 2))


@pytest.fixture
def cfg4():
    return EvalConfig(Fraction(1, 4))


@pytest.fixture
def fcfg():
    return EvalConfig(Fraction(1, 2), mode="float", float_precision_bits=128)


# criterion lines recorded by test_acceptance.py, echoed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
