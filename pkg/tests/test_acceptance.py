"""Every acceptance criterion at its stated size and tolerance, one line each."""

import pytest

from fourblock import acceptance
from conftest import ACCEPTANCE_LINES


def _report(result):
    line = result.line()
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert result.passed, line


def test_criterion_1_worked_example():
    res = acceptance.criterion_1_worked_example()
    _report(res)
    assert res.seconds < 1.0


@pytest.mark.slow
def test_criterion_2_oracle_equivalence():
    res = acceptance.criterion_2_oracle_equivalence(count=200)
    _report(res)
    assert res.seconds < 1800


@pytest.mark.slow
def test_criterion_3_faithfulness():
    _report(acceptance.criterion_3_faithfulness(samples=50, matrices=10))


def test_criterion_4_arrangements():
    _report(acceptance.criterion_4_arrangements(sets=10, points=1000))


def test_criterion_5_graver():
    _report(acceptance.criterion_5_graver(random_count=20))


def test_criterion_6_tu_relaxation():
    _report(acceptance.criterion_6_tu_relaxation(programs=30))


def test_criterion_7_reduction():
    _report(acceptance.criterion_7_reduction(count=30))


def test_criterion_8_scaling():
    _report(acceptance.criterion_8_scaling(ns=(2, 4, 8, 16)))
